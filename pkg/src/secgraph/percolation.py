"""Oriented out-percolation of the Poisson secrecy graph.

Finite-window surrogate: a sample percolates when the out-component of the
node at the window centre reaches the shell of width ``w`` along the window
boundary.  Good nodes are drawn on the plain window, eavesdroppers on an
inflated one.

Threshold searches couple all probes of a run: the good nodes are fixed and
eavesdroppers are drawn once at the largest intensity with a uniform mark
each, so the process at intensity lam keeps the marks below lam.  Edge sets
then shrink monotonically in lam and grow in r, every run has a single
switching point, and bisection per run finds it.
"""
from __future__ import annotations

import csv
import io
import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order
from scipy.spatial import cKDTree

from . import analytics
from .graph import SecrecyGraph, build_directed, degree_summary, sample_graph
from .lattice import wilson_interval
from .pointprocess import (
    STREAM_EAVES,
    STREAM_GOODS,
    STREAM_MARKS,
    ParameterError,
    SeedSpec,
    Window,
    add_center_node,
    default_margin,
    distances,
    sample_ppp,
)
from .thresholds import BracketError, ThresholdEstimate, combine_ladder, summarize

log = logging.getLogger(__name__)

DEFAULT_LADDER = (40, 60, 80)
# per-run bisection resolution on lambda and r
LAMBDA_TOL = 1e-3
R_TOL = 2e-3


def default_shell_width(lam: float, r: float, side: float) -> float:
    """max(r_finite, 2/sqrt(lam)), falling back to r when lam = 0, capped at L/4."""
    finite_r = r if math.isfinite(r) else 0.0
    w = max(finite_r, 2 / math.sqrt(lam)) if lam > 0 else max(finite_r, 1.0)
    return min(w, side / 4)


@dataclass(frozen=True)
class PercRunParams:
    lam: float
    r: float
    side: float
    runs: int
    shell_width: float | None = None
    master_seed: int = 0

    def __post_init__(self):
        analytics.check_params(self.lam, self.r)
        if self.runs < 1:
            raise ParameterError("runs must be >= 1")
        need = 20 * max(self.r, 1.0) if math.isfinite(self.r) else 20 / math.sqrt(self.lam)
        if self.side < need:
            raise ParameterError(f"window side {self.side} is below 20x the length scale ({need:.3g})")

    @property
    def width(self) -> float:
        if self.shell_width is not None:
            return self.shell_width
        return default_shell_width(self.lam, self.r, self.side)


def _origin(g: SecrecyGraph) -> int:
    if g.goods.origin is not None:
        return g.goods.origin
    c = np.array(g.goods.window.center)
    return int(np.argmin(distances(g.goods.points, c[None], None)))


def _edge_distance(pts: np.ndarray, side: float) -> np.ndarray:
    return np.minimum(np.minimum(pts[:, 0], side - pts[:, 0]), np.minimum(pts[:, 1], side - pts[:, 1]))


def percolates(g: SecrecyGraph, shell_width: float) -> bool:
    """Does the out-component of the most central node reach the boundary shell?"""
    if g.goods.window.torus:
        raise ParameterError("the boundary-shell criterion needs a plain window")
    if g.n == 0:
        log.warning("percolates() called on a sample without good nodes")
        return False
    start = _origin(g)
    order = breadth_first_order(g.adjacency(), start, directed=True, return_predecessors=False)
    return bool(np.any(_edge_distance(g.goods.points[order], g.goods.window.side) <= shell_width))


def _sample_for_percolation(lam: float, r: float, side: float, seed: SeedSpec) -> SecrecyGraph:
    gw = Window(side)
    goods = add_center_node(sample_ppp(1.0, gw, seed, STREAM_GOODS))
    eaves = sample_ppp(lam, gw.inflated(default_margin(lam, r, side)), seed, STREAM_EAVES)
    return build_directed(goods, eaves, r)


def _theta_run(args) -> bool:
    lam, r, side, w, master, k = args
    return percolates(_sample_for_percolation(lam, r, side, SeedSpec(master, k)), w)


def _map(fn, items, workers: int | None):
    items = list(items)
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


@dataclass(frozen=True)
class ThetaEstimate:
    theta_hat: float
    ci: tuple[float, float]
    runs: int
    criterion: dict

    def to_dict(self) -> dict:
        return {"theta_hat": self.theta_hat, "ci": list(self.ci), "runs": self.runs, "criterion": self.criterion}


def estimate_theta(p: PercRunParams, workers: int | None = None) -> ThetaEstimate:
    """Fraction of independent samples that percolate, with a Wilson 95% interval."""
    if p.runs < 30:
        raise ParameterError("estimate_theta needs at least 30 runs")
    w = p.width
    hits = _map(_theta_run, [(p.lam, p.r, p.side, w, p.master_seed, k) for k in range(p.runs)], workers)
    k = int(sum(hits))
    crit = {"kind": "center_out_component_reaches_shell", "shell_width": w, "L": p.side}
    return ThetaEstimate(k / p.runs, wilson_interval(k, p.runs), p.runs, crit)


class CoupledSample:
    """Goods, marked eavesdroppers and a candidate edge list shared by all probes of one run.

    ``lam_max`` is the largest intensity probed and ``lam_min``/``r_max``
    define the most permissive probe, which fixes the candidate edges.
    """

    def __init__(self, side: float, seed: SeedSpec, lam_max: float, lam_min: float, r_max: float,
                 shell_width: float):
        self.side = side
        gw = Window(side)
        goods = add_center_node(sample_ppp(1.0, gw, seed, STREAM_GOODS))
        self.points = goods.points
        self.origin = goods.origin
        margin = default_margin(lam_min, r_max, side)
        eaves = sample_ppp(lam_max, gw.inflated(margin), seed, STREAM_EAVES)
        marks = seed.generator(STREAM_MARKS).random(len(eaves))
        self.eaves = eaves.points
        self.levels = marks * lam_max
        self.near = _edge_distance(self.points, side) <= shell_width
        self._guard_cache: dict[float, np.ndarray] = {}

        n = len(self.points)
        reach = np.minimum(self.guard(lam_min), r_max)
        nb = cKDTree(self.points).query_ball_point(self.points, reach * (1 + 1e-9), return_sorted=False)
        counts = np.fromiter(map(len, nb), dtype=np.intp, count=n)
        src = np.repeat(np.arange(n), counts)
        dst = np.fromiter(itertools.chain.from_iterable(nb), dtype=np.intp, count=int(counts.sum()))
        d = distances(self.points[src], self.points[dst])
        keep = src != dst
        self.src, self.dst, self.dist = src[keep], dst[keep], d[keep]

    def guard(self, lam: float) -> np.ndarray:
        g = self._guard_cache.get(lam)
        if g is None:
            sel = self.eaves[self.levels < lam]
            if len(sel) == 0:
                g = np.full(len(self.points), np.inf)
            else:
                k = min(4, len(sel))
                _, idx = cKDTree(sel).query(self.points, k=k)
                idx = np.asarray(idx).reshape(len(self.points), k)
                g = distances(self.points[:, None, :], sel[idx]).min(axis=1)
            self._guard_cache[lam] = g
        return g

    def reaches(self, lam: float, r: float) -> bool:
        mask = (self.dist <= r) & (self.dist < self.guard(lam)[self.src])
        n = len(self.points)
        s, t = self.src[mask], self.dst[mask]
        indptr = np.zeros(n + 1, dtype=np.intp)
        np.cumsum(np.bincount(s, minlength=n), out=indptr[1:])
        adj = csr_matrix((np.ones(len(t), dtype=np.int8), t, indptr), shape=(n, n))
        order = breadth_first_order(adj, self.origin, directed=True, return_predecessors=False)
        return bool(self.near[order].any())


def _bisect_run(pred, lo: float, hi: float, tol: float, increasing: bool) -> float:
    """Switching point of a monotone predicate on [lo, hi], clamped to the ends."""
    # increasing: pred False below, True above (r); otherwise True below, False above (lambda)
    if increasing:
        if pred(lo):
            return lo
        if not pred(hi):
            return hi
    else:
        if not pred(lo):
            return lo
        if pred(hi):
            return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == increasing:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _lambda_run(args) -> float:
    r, side, lo, hi, w, master, k, tol = args
    s = CoupledSample(side, SeedSpec(master, k), hi, lo, r, w)
    return _bisect_run(lambda lam: s.reaches(lam, r), lo, hi, tol, increasing=False)


def _r_run(args) -> float:
    lam, side, lo, hi, w, master, k, tol = args
    s = CoupledSample(side, SeedSpec(master, k), max(lam, 1e-12), lam, hi, w)
    return _bisect_run(lambda r: s.reaches(lam, r), lo, hi, tol, increasing=True)


def _ladder_for(ladder, r: float) -> list[int]:
    need = 20 * max(r, 1.0) if math.isfinite(r) else 0
    return sorted({int(max(L, math.ceil(need))) for L in ladder})


def lambda_thresholds(r: float, side: float, runs: int, master_seed: int, lo: float, hi: float,
                      shell_width: float, tol: float = LAMBDA_TOL, workers: int | None = None) -> np.ndarray:
    """Per-run critical eavesdropper intensities at fixed range r."""
    args = [(r, side, lo, hi, shell_width, master_seed, k, tol) for k in range(runs)]
    return np.array(_map(_lambda_run, args, workers))


def radius_thresholds(lam: float, side: float, runs: int, master_seed: int, lo: float, hi: float,
                      shell_width: float, tol: float = R_TOL, workers: int | None = None) -> np.ndarray:
    """Per-run critical ranges at fixed eavesdropper intensity."""
    args = [(lam, side, lo, hi, shell_width, master_seed, k, tol) for k in range(runs)]
    return np.array(_map(_r_run, args, workers))


def _lambda_shell(r: float, side: float) -> float:
    ref = analytics.LAMBDA_INF_REF
    if math.isfinite(r) and r > analytics.R_GILBERT_REF:
        ref = analytics.critical_lambda_approx(r)
    return default_shell_width(max(ref, 0.02), r, side)


def estimate_lambda_c(r: float, ladder=DEFAULT_LADDER, runs_per_probe: int = 100, master_seed: int = 0,
                      bracket: tuple[float, float] = (0.005, 0.3), shell_width: float | None = None,
                      workers: int | None = None) -> ThresholdEstimate:
    """Critical eavesdropper intensity lambda_c(r) (r may be inf)."""
    direction = "lambda_inf" if math.isinf(r) else "lambda_c_of_r"
    if math.isfinite(r) and r <= analytics.R_GILBERT_REF:
        return ThresholdEstimate(0.0, 0.0, 0.0, direction, {"r": r}, ("subcritical",))
    if runs_per_probe < 30:
        raise ParameterError("need at least 30 runs per probe")
    lo, hi = bracket
    if math.isinf(r):
        lo = max(lo, 0.03)
    per_size = {}
    for L in _ladder_for(ladder, r):
        w = shell_width if shell_width is not None else _lambda_shell(r, L)
        t = lambda_thresholds(r, L, runs_per_probe, master_seed, lo, hi, w, workers=workers)
        per_size[L] = summarize(t, lo, hi, increasing=False, direction=direction, seed=master_seed + L,
                                tol=LAMBDA_TOL, method={"r": _json_float(r), "L": L, "shell_width": w})
    return combine_ladder(per_size, direction)


def estimate_lambda_inf(ladder=DEFAULT_LADDER, runs: int = 100, master_seed: int = 0,
                        workers: int | None = None) -> ThresholdEstimate:
    return estimate_lambda_c(math.inf, ladder, runs, master_seed, workers=workers)


def estimate_r_c(lam: float, ladder=DEFAULT_LADDER, runs_per_probe: int = 100, master_seed: int = 0,
                 lambda_inf: float = analytics.LAMBDA_INF_REF, bracket: tuple[float, float] | None = None,
                 shell_width: float | None = None, workers: int | None = None) -> ThresholdEstimate:
    """Critical range r_c(lam); at lam = 0 this is Gilbert's radius."""
    if lam >= lambda_inf:
        raise ParameterError(f"lambda={lam} is at or beyond the asymptote lambda_inf={lambda_inf}: "
                             "no finite range percolates")
    if lam < 0:
        raise ParameterError("lambda must be >= 0")
    if runs_per_probe < 30:
        raise ParameterError("need at least 30 runs per probe")
    guess = analytics.critical_radius_approx(lam)
    lo, hi = bracket or (0.6, max(2.5, 2.5 * guess))
    direction = "gilbert_r" if lam == 0 else "r_c_of_lambda"
    per_size = {}
    for L in _ladder_for(ladder, hi / 2):
        w = shell_width if shell_width is not None else default_shell_width(lam, guess, L)
        t = radius_thresholds(lam, L, runs_per_probe, master_seed, lo, hi, w, workers=workers)
        per_size[L] = summarize(t, lo, hi, increasing=True, direction=direction, seed=master_seed + L,
                                tol=R_TOL, method={"lambda": lam, "L": L, "shell_width": w})
    return combine_ladder(per_size, direction)


@dataclass(frozen=True)
class CriticalGraphStats:
    lam: float
    r: float
    p_isol_hat: float
    p_isol_se: float
    mean_out_hat: float
    mean_out_se: float
    approx: analytics.CriticalGraphApprox

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "r": self.r, "p_isol_hat": self.p_isol_hat, "p_isol_se": self.p_isol_se,
                "mean_out_hat": self.mean_out_hat, "mean_out_se": self.mean_out_se,
                "p_isol_approx": self.approx.p_isol, "mean_deg_lower": self.approx.mean_deg_lower}


def critical_graph_stats(lam: float, r_c_est: float, runs: int = 20, master_seed: int = 0,
                         side: float = 60.0) -> CriticalGraphStats:
    """Out-isolation fraction and mean out-degree of graphs at (lam, r_c_est) on a torus."""
    iso, mean = [], []
    for k in range(runs):
        s = degree_summary(sample_graph(lam, r_c_est, side, SeedSpec(master_seed, k), "torus"))
        iso.append(s.isolation("n_out"))
        mean.append(s.mean("n_out"))
    se = (lambda v: float(np.std(v, ddof=1) / math.sqrt(len(v))) if len(v) > 1 else math.nan)
    return CriticalGraphStats(lam, r_c_est, float(np.mean(iso)), se(iso), float(np.mean(mean)), se(mean),
                              analytics.critical_graph_approx(lam))


@dataclass
class SweepResult:
    direction: str
    rows: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    HEADER = ("x", "estimate", "ci_lo", "ci_hi", "approx", "residual")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.HEADER)
        for row in self.rows:
            w.writerow([_fmt(row[k]) for k in self.HEADER])
        return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


@dataclass(frozen=True)
class SweepConfig:
    side: float | None = None
    runs: int = 100
    master_seed: int = 0
    workers: int | None = None


def sweep(direction: str, grid, config: SweepConfig = SweepConfig()) -> SweepResult:
    """Threshold estimates over a sorted grid, with residuals against the fitted curve.

    ``direction="lambda_c"`` sweeps r and estimates lambda_c(r); ``"r_c"``
    sweeps lambda.  All points share one window and master seed, so run k
    sees the same good nodes and eavesdropper marks at every grid point and
    the per-run thresholds are monotone along the grid.
    """
    grid = [float(x) for x in grid]
    if grid != sorted(grid):
        raise ParameterError("sweep grid must be sorted")
    res = SweepResult(direction)
    if not grid:
        return res
    if direction == "lambda_c":
        finite = [x for x in grid if math.isfinite(x)]
        side = config.side or max([80.0] + [20 * x for x in finite])
        widths = [_lambda_shell(x, side) for x in grid if x > analytics.R_GILBERT_REF]
        w = max(widths) if widths else default_shell_width(analytics.LAMBDA_INF_REF, math.inf, side)
        for x in grid:
            try:
                est = estimate_lambda_c(x, ladder=(side,), runs_per_probe=config.runs,
                                        master_seed=config.master_seed, shell_width=w, workers=config.workers)
                approx = analytics.critical_lambda_approx(x) if x > analytics.R_GILBERT_REF else 0.0
                res.rows.append(_row(x, est, approx))
            except (BracketError, ParameterError) as exc:
                res.failures.append({"x": x, "error": str(exc)})
                res.rows.append(_row(x, None, math.nan))
    elif direction == "r_c":
        side = config.side or 80.0
        w = default_shell_width(max(grid[0], 0.02), analytics.R_GILBERT_REF, side) if grid[0] > 0 \
            else default_shell_width(0.0, analytics.R_GILBERT_REF, side)
        hi = max(2.5, 2.5 * analytics.critical_radius_approx(min(grid[-1], analytics.LAMBDA_INF_REF - 1e-3)))
        for x in grid:
            try:
                est = estimate_r_c(x, ladder=(side,), runs_per_probe=config.runs, master_seed=config.master_seed,
                                   bracket=(0.6, hi), shell_width=w, workers=config.workers)
                res.rows.append(_row(x, est, analytics.critical_radius_approx(x)))
            except (BracketError, ParameterError) as exc:
                res.failures.append({"x": x, "error": str(exc)})
                res.rows.append(_row(x, None, math.nan))
    else:
        raise ParameterError(f"direction must be 'lambda_c' or 'r_c', got {direction!r}")
    return res


def _row(x: float, est: ThresholdEstimate | None, approx: float) -> dict:
    if est is None:
        return {"x": x, "estimate": math.nan, "ci_lo": math.nan, "ci_hi": math.nan,
                "approx": approx, "residual": math.nan}
    return {"x": x, "estimate": est.value, "ci_lo": est.ci_lo, "ci_hi": est.ci_hi,
            "approx": approx, "residual": est.value - approx}
