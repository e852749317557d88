"""Reproducible experiments behind the command line.

Each ``cmd_*`` function is a pure function of its :class:`ExperimentConfig`
(including the master seed) and returns an :class:`ExperimentRecord` whose
rendering is byte-identical across reruns.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, analytics
from .graph import DEGREE_KINDS, EdgeLengthSample, degree_summary, edge_lengths, sample_graph
from .lattice import crossing_fraction, estimate_pc
from .percolation import PercRunParams, SweepConfig, estimate_lambda_c, estimate_r_c, estimate_theta, sweep
from .pointprocess import ParameterError, SeedSpec


def _encode(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    return v


def _decode(v):
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    if isinstance(v, list):
        return [_decode(x) for x in v]
    return v


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    fmt: str = "csv"
    # execution detail only; results do not depend on it
    workers: int | None = field(default=None, compare=False)

    def canonical(self) -> str:
        doc = {"command": self.command, "format": self.fmt,
               "params": {k: _encode(v) for k, v in sorted(self.params.items())}}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def parse(cls, text: str) -> ExperimentConfig:
        doc = json.loads(text)
        return cls(doc["command"], {k: _decode(v) for k, v in doc["params"].items()}, doc["format"])

    def get(self, key, default=None):
        return self.params.get(key, default)


def fmt_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


@dataclass
class ExperimentRecord:
    config: ExperimentConfig
    columns: list[str]
    rows: list[dict]
    summary: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# config: {self.config.canonical()}\n")
        buf.write(f"# version: {__version__}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt_value(row.get(c, "")) for c in self.columns])
        if self.summary:
            buf.write(f"# summary: {json.dumps(_clean(self.summary), sort_keys=True)}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"config": json.loads(self.config.canonical()), "version": __version__,
               "summary": _clean(self.summary), "rows": _clean(self.rows)}
        if self.failures:
            doc["failures"] = self.failures
        return json.dumps(doc, sort_keys=True, indent=1) + "\n"

    def render(self) -> str:
        return self.to_json() if self.config.fmt == "json" else self.to_csv()


@dataclass
class PooledDegrees:
    """Degree samples from many independent torus runs, aggregated by run index."""

    lam: float
    r: float
    values: dict[str, np.ndarray]
    run_means: dict[str, np.ndarray]
    run_isolation: dict[str, np.ndarray]
    identity_ok: list[bool]
    run_sizes: np.ndarray

    def per_run(self, kind: str) -> list[np.ndarray]:
        return np.split(self.values[kind], np.cumsum(self.run_sizes)[:-1])

    def mean(self, kind: str) -> float:
        return float(self.values[kind].mean())

    def mean_se(self, kind: str) -> float:
        m = self.run_means[kind]
        return float(np.std(m, ddof=1) / math.sqrt(len(m)))

    def isolation(self, kind: str) -> float:
        return float(np.mean(self.values[kind] == 0))

    def isolation_se(self, kind: str) -> float:
        v = self.run_isolation[kind]
        return float(np.std(v, ddof=1) / math.sqrt(len(v)))

    def pmf(self, kind: str, nmax: int) -> np.ndarray:
        c = np.bincount(self.values[kind], minlength=nmax + 1)[:nmax + 1]
        return c / len(self.values[kind])

    def cdf(self, kind: str, nmax: int) -> np.ndarray:
        return np.array([np.mean(self.values[kind] <= k) for k in range(nmax + 1)])


def pooled_degrees(lam: float, r: float, side: float, runs: int, master_seed: int) -> PooledDegrees:
    per_run = []
    for k in range(runs):
        s = degree_summary(sample_graph(lam, r, side, SeedSpec(master_seed, k), "torus"))
        tot = s.totals()
        ok = tot["n_basic"] + tot["n_enhanced"] == 2 * tot["n_out"] == 2 * tot["n_in"]
        per_run.append((s, ok))
    values = {kd: np.concatenate([getattr(s, kd) for s, _ in per_run]) for kd in DEGREE_KINDS}
    means = {kd: np.array([s.mean(kd) for s, _ in per_run]) for kd in DEGREE_KINDS}
    iso = {kd: np.array([s.isolation(kd) for s, _ in per_run]) for kd in DEGREE_KINDS}
    sizes = np.array([len(s.n_out) for s, _ in per_run])
    return PooledDegrees(lam, r, values, means, iso, [ok for _, ok in per_run], sizes)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    n = max(len(p), len(q))
    p = np.pad(p, (0, n - len(p)))
    q = np.pad(q, (0, n - len(q)))
    return 0.5 * float(np.abs(p - q).sum())


def _require(cfg: ExperimentConfig, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ParameterError(f"missing parameters for {cfg.command}: {', '.join(missing)}")


def cmd_degrees(cfg: ExperimentConfig) -> ExperimentRecord:
    """Empirical degree pmfs next to the analytic out-degree law and its two limits."""
    _require(cfg, "lam", "r", "L", "runs", "seed")
    lam, r = cfg.get("lam"), cfg.get("r")
    analytics.check_params(lam, r)
    pooled = pooled_degrees(lam, r, cfg.get("L"), cfg.get("runs"), cfg.get("seed"))
    nmax = int(cfg.get("nmax") or max(30, int(pooled.values["n_out"].max())))
    emp = {kd: pooled.pmf(kd, nmax) for kd in DEGREE_KINDS}
    analytic = analytics.out_degree_pmf_array(lam, r, nmax)
    rows = []
    for n in range(nmax + 1):
        row = {"n": n, "emp_out": emp["n_out"][n], "emp_in": emp["n_in"][n], "emp_basic": emp["n_basic"][n],
               "emp_enhanced": emp["n_enhanced"][n], "analytic_out": analytic[n]}
        row["poisson_ref"] = (analytics.out_degree_pmf(0.0, r, n) if math.isfinite(r) else math.nan)
        row["geometric_ref"] = (analytics.out_degree_pmf(lam, math.inf, n) if lam > 0 else math.nan)
        rows.append(row)
    summary = {"tv_out": total_variation(emp["n_out"], analytic),
               "mean_out": pooled.mean("n_out"), "mean_out_analytic": analytics.mean_out_degree(lam, r),
               "mean_basic": pooled.mean("n_basic"), "mean_basic_analytic": analytics.mean_basic_degree(lam, r),
               "mean_enhanced": pooled.mean("n_enhanced"),
               "mean_enhanced_analytic": analytics.mean_enhanced_degree(lam, r),
               "nodes": int(len(pooled.values["n_out"])), "identity_ok": all(pooled.identity_ok)}
    cols = ["n", "emp_out", "emp_in", "emp_basic", "emp_enhanced", "analytic_out", "poisson_ref", "geometric_ref"]
    return ExperimentRecord(cfg, cols, rows, summary)


def cmd_isolation(cfg: ExperimentConfig) -> ExperimentRecord:
    """Isolation fractions for every graph type over a grid of eavesdropper densities."""
    _require(cfg, "lams", "r", "L", "runs", "seed")
    r = cfg.get("r")
    rows = []
    for lam in cfg.get("lams"):
        analytics.check_params(lam, r)
        pooled = pooled_degrees(lam, r, cfg.get("L"), cfg.get("runs"), cfg.get("seed"))
        row = {"lambda": lam, "r": r}
        for kd, name in zip(DEGREE_KINDS, ("out", "in", "basic", "enhanced")):
            row[f"emp_{name}"] = pooled.isolation(kd)
            row[f"se_{name}"] = pooled.isolation_se(kd)
        row["analytic_out"] = analytics.out_isolation(lam, r)
        row["analytic_basic"] = analytics.basic_isolation(lam) if math.isinf(r) else math.nan
        slack = lambda a, b: 3 * math.hypot(row[f"se_{a}"], row[f"se_{b}"])  # noqa: E731
        row["ordering_ok"] = (row["emp_enhanced"] <= row["emp_in"] + slack("enhanced", "in")
                              and row["emp_in"] <= row["emp_out"] + slack("in", "out"))
        rows.append(row)
    cols = ["lambda", "r", "emp_out", "se_out", "emp_in", "se_in", "emp_basic", "se_basic",
            "emp_enhanced", "se_enhanced", "analytic_out", "analytic_basic", "ordering_ok"]
    return ExperimentRecord(cfg, cols, rows, {"ordering_ok": all(r_["ordering_ok"] for r_ in rows)})


def cmd_ratios(cfg: ExperimentConfig) -> ExperimentRecord:
    _require(cfg, "lams", "rs")
    rows = []
    for lam in cfg.get("lams"):
        for r in cfg.get("rs"):
            eta, eta_p = analytics.secrecy_ratios(lam, r)
            rows.append({"lambda": lam, "r": r, "eta": eta, "eta_prime": eta_p, "basic_over_enhanced": eta / eta_p})
    return ExperimentRecord(cfg, ["lambda", "r", "eta", "eta_prime", "basic_over_enhanced"], rows,
                            {"floor": analytics.basic_to_enhanced_floor()})


def cmd_edges(cfg: ExperimentConfig) -> ExperimentRecord:
    """Edge-length histogram with the Rayleigh (r = inf) or 2x/r^2 (lam = 0) reference."""
    _require(cfg, "lam", "r", "L", "runs", "seed")
    lam, r = cfg.get("lam"), cfg.get("r")
    lengths = []
    sample = None
    for k in range(cfg.get("runs")):
        sample = edge_lengths(sample_graph(lam, r, cfg.get("L"), SeedSpec(cfg.get("seed"), k), "torus"))
        lengths.append(sample.lengths)
    pooled = EdgeLengthSample(np.concatenate(lengths), lam, r)
    bins = int(cfg.get("bins") or 40)
    top = float(np.quantile(pooled.lengths, 0.999)) if math.isinf(r) else r
    edges = np.linspace(0, top, bins + 1)
    hist, _ = np.histogram(pooled.lengths, edges)
    cdf = pooled.reference_cdf()
    ref = np.diff(cdf(edges))
    width = edges[1] - edges[0]
    rows = [{"bin_lo": edges[i], "bin_hi": edges[i + 1], "density": hist[i] / (len(pooled.lengths) * width),
             "reference_density": ref[i] / width} for i in range(bins)]
    summary = {"ks": pooled.ks_distance(), "tail_deviation": pooled.tail_deviation(), "edges": len(pooled.lengths),
               "mean_length": float(pooled.lengths.mean())}
    if lam > 0:
        summary["rayleigh_mean"] = analytics.reference_densities(lam).rayleigh_edge_mean
    return ExperimentRecord(cfg, ["bin_lo", "bin_hi", "density", "reference_density"], rows, summary)


def cmd_regimes(cfg: ExperimentConfig) -> ExperimentRecord:
    """Mean out-degree versus range with the regime boundary and piecewise bound."""
    _require(cfg, "lam")
    lam = cfg.get("lam")
    reg = analytics.regime_descriptors(lam)
    rs = cfg.get("rs") or list(np.round(np.geomspace(0.05, 20, 60), 12))
    rows = [{"r": r, "mean_out": analytics.mean_out_degree(lam, r), "piecewise_bound": reg.piecewise_bound(r),
             "r_T": reg.r_T, "regime": "power" if reg.power_limited(r) else "secrecy"} for r in rs]
    return ExperimentRecord(cfg, ["r", "mean_out", "piecewise_bound", "r_T", "regime"], rows,
                            {"r_T": reg.r_T, "slope": reg.slope, "r_eps_0.01": reg.r_eps(0.01)})


def cmd_lattice(cfg: ExperimentConfig) -> ExperimentRecord:
    _require(cfg, "placement", "rule", "n", "runs", "seed")
    ps = cfg.get("ps") or []
    rows = []
    for p in ps:
        row = crossing_fraction(cfg.get("n"), p, cfg.get("placement"), cfg.get("rule"), cfg.get("runs"),
                                cfg.get("seed"), cfg.get("which", "enhanced"), cfg.get("ball", "open"))
        rows.append(row.__dict__)
    summary = {}
    if cfg.get("estimate"):
        est = estimate_pc(cfg.get("placement"), cfg.get("rule"), (cfg.get("n"),), cfg.get("runs"), cfg.get("seed"),
                          cfg.get("which", "enhanced"), cfg.get("ball", "open"))
        summary["p_c"] = est.to_dict()
    return ExperimentRecord(cfg, ["p", "n", "crossing_fraction", "ci_lo", "ci_hi"], rows, summary)


def cmd_percolate(cfg: ExperimentConfig) -> ExperimentRecord:
    _require(cfg, "lam", "r", "L", "runs", "seed")
    params = PercRunParams(cfg.get("lam"), cfg.get("r"), cfg.get("L"), cfg.get("runs"),
                           cfg.get("shell_width"), cfg.get("seed"))
    est = estimate_theta(params, workers=cfg.workers)
    return ExperimentRecord(cfg, [], [], est.to_dict())


def cmd_threshold(cfg: ExperimentConfig) -> ExperimentRecord:
    _require(cfg, "direction", "runs", "seed")
    ladder = tuple(cfg.get("ladder") or (40, 60, 80))
    direction = cfg.get("direction")
    workers = cfg.workers
    if direction == "lambda_c":
        _require(cfg, "r")
        est = estimate_lambda_c(cfg.get("r"), ladder, cfg.get("runs"), cfg.get("seed"), workers=workers)
    elif direction == "lambda_inf":
        est = estimate_lambda_c(math.inf, ladder, cfg.get("runs"), cfg.get("seed"), workers=workers)
    elif direction == "r_c":
        _require(cfg, "lam")
        est = estimate_r_c(cfg.get("lam"), ladder, cfg.get("runs"), cfg.get("seed"), workers=workers)
    else:
        raise ParameterError(f"unknown threshold direction {direction!r}")
    return ExperimentRecord(cfg, [], [], est.to_dict())


def cmd_sweep(cfg: ExperimentConfig) -> ExperimentRecord:
    _require(cfg, "direction", "grid", "runs", "seed")
    res = sweep(cfg.get("direction"), cfg.get("grid"),
                SweepConfig(cfg.get("L"), cfg.get("runs"), cfg.get("seed"), cfg.workers))
    return ExperimentRecord(cfg, list(res.HEADER), res.rows, {"failures": len(res.failures)}, res.failures)


def cmd_analytic(cfg: ExperimentConfig) -> ExperimentRecord:
    _require(cfg, "quantity")
    q = cfg.get("quantity")
    if q not in analytics.QUANTITIES:
        raise ParameterError(f"unknown quantity {q!r}; choose from {', '.join(analytics.QUANTITIES)}")
    fn = analytics.QUANTITIES[q]
    value = fn(cfg.get("lam", 0.0), cfg.get("r", math.inf), cfg.get("n", 0))
    return ExperimentRecord(cfg, [q], [{q: value}])


COMMANDS = {
    "degrees": cmd_degrees,
    "isolation": cmd_isolation,
    "ratios": cmd_ratios,
    "edges": cmd_edges,
    "regimes": cmd_regimes,
    "lattice": cmd_lattice,
    "percolate": cmd_percolate,
    "threshold": cmd_threshold,
    "sweep": cmd_sweep,
    "analytic": cmd_analytic,
}


def run(cfg: ExperimentConfig) -> ExperimentRecord:
    return COMMANDS[cfg.command](cfg)
