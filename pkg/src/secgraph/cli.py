"""Command-line front end: ``secgraph <command> [flags]``.

Exit codes: 0 success, 1 usage or parameter error, 2 partial failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys

from . import __version__, analytics
from .experiments import ExperimentConfig, fmt_value, run
from .pointprocess import ParameterError
from .thresholds import BracketError

SEED_ENV = "SECGRAPH_SEED"
JSON_DEFAULT = {"percolate", "threshold", "analytic"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _real(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _reals(text: str) -> list[float]:
    return [_real(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None, help="write output to PATH instead of stdout")
    common.add_argument("--runs-parallel", type=int, default=None, dest="workers",
                        help="cap on worker processes (default: available CPUs)")

    p = _Parser(prog="secgraph", description="Secrecy graph experiments.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analytic", parents=[common], help="evaluate closed-form quantities")
    a.add_argument("quantity", help="comma-separated names: " + ", ".join(analytics.QUANTITIES))
    a.add_argument("--lambda", dest="lam", type=_reals, default=[0.0])
    a.add_argument("--r", type=_reals, default=[math.inf])
    a.add_argument("--n", type=_ints, default=[0])
    a.add_argument("--batch", default=None, help="CSV with lambda,r,n columns; results are appended")

    d = sub.add_parser("degrees", parents=[common], help="degree pmfs (empirical and analytic)")
    d.add_argument("--lambda", dest="lam", type=_real, required=True)
    d.add_argument("--r", type=_real, default=math.inf)
    d.add_argument("--L", type=float, default=100.0)
    d.add_argument("--runs", type=int, default=30)
    d.add_argument("--nmax", type=int, default=None)

    i = sub.add_parser("isolation", parents=[common], help="isolation probabilities over a lambda grid")
    i.add_argument("--lambda", dest="lam", type=_reals, required=True)
    i.add_argument("--r", type=_real, default=math.inf)
    i.add_argument("--L", type=float, default=100.0)
    i.add_argument("--runs", type=int, default=30)

    r = sub.add_parser("ratios", parents=[common], help="secrecy ratio table")
    r.add_argument("--lambda", dest="lam", type=_reals, required=True)
    r.add_argument("--r", type=_reals, required=True)

    e = sub.add_parser("edges", parents=[common], help="edge-length histogram")
    e.add_argument("--lambda", dest="lam", type=_real, required=True)
    e.add_argument("--r", type=_real, default=math.inf)
    e.add_argument("--L", type=float, default=100.0)
    e.add_argument("--runs", type=int, default=10)
    e.add_argument("--bins", type=int, default=40)

    g = sub.add_parser("regimes", parents=[common], help="mean out-degree versus range")
    g.add_argument("--lambda", dest="lam", type=_real, required=True)
    g.add_argument("--r", type=_reals, default=None)

    lt = sub.add_parser("lattice", parents=[common], help="square-lattice crossing fractions")
    lt.add_argument("--placement", choices=("midpoints", "edge_midpoints", "sites"), default="midpoints")
    lt.add_argument("--rule", choices=("analogy", "geometric", "geometric_strict"), default="analogy")
    lt.add_argument("--p", type=_reals, default=[])
    lt.add_argument("--n", type=int, default=64)
    lt.add_argument("--runs", type=int, default=100)
    lt.add_argument("--ball", choices=("open", "closed"), default="open")
    lt.add_argument("--which", choices=("basic", "enhanced"), default="enhanced")
    lt.add_argument("--estimate", action="store_true", help="also estimate p_c at this n")

    pc = sub.add_parser("percolate", parents=[common], help="percolation probability estimate")
    pc.add_argument("--lambda", dest="lam", type=_real, required=True)
    pc.add_argument("--r", type=_real, default=math.inf)
    pc.add_argument("--L", type=float, default=60.0)
    pc.add_argument("--runs", type=int, default=100)
    pc.add_argument("--shell-width", type=float, default=None)

    th = sub.add_parser("threshold", parents=[common], help="critical value by bisection")
    th.add_argument("--direction", choices=("lambda_c", "r_c", "lambda_inf"), required=True)
    th.add_argument("--lambda", dest="lam", type=_real, default=None)
    th.add_argument("--r", type=_real, default=None)
    th.add_argument("--L", type=_reals, default=[40.0, 60.0, 80.0], help="window ladder, comma-separated")
    th.add_argument("--runs", type=int, default=100)

    sw = sub.add_parser("sweep", parents=[common], help="threshold curve over a grid")
    sw.add_argument("--direction", choices=("lambda_c", "r_c"), required=True)
    sw.add_argument("--grid", type=_reals, required=True)
    sw.add_argument("--L", type=float, default=None)
    sw.add_argument("--runs", type=int, default=100)
    return p


def _config(ns: argparse.Namespace) -> ExperimentConfig:
    seed = ns.seed if ns.seed is not None else _default_seed()
    fmt = ns.format or ("json" if ns.command in JSON_DEFAULT else "csv")
    c = ns.command
    if c == "degrees":
        params = {"lam": ns.lam, "r": ns.r, "L": ns.L, "runs": ns.runs, "seed": seed, "nmax": ns.nmax}
    elif c == "isolation":
        params = {"lams": ns.lam, "r": ns.r, "L": ns.L, "runs": ns.runs, "seed": seed}
    elif c == "ratios":
        params = {"lams": ns.lam, "rs": ns.r}
    elif c == "edges":
        params = {"lam": ns.lam, "r": ns.r, "L": ns.L, "runs": ns.runs, "seed": seed, "bins": ns.bins}
    elif c == "regimes":
        params = {"lam": ns.lam, "rs": ns.r}
    elif c == "lattice":
        params = {"placement": ns.placement, "rule": ns.rule, "ps": ns.p, "n": ns.n, "runs": ns.runs,
                  "seed": seed, "ball": ns.ball, "which": ns.which, "estimate": ns.estimate}
    elif c == "percolate":
        params = {"lam": ns.lam, "r": ns.r, "L": ns.L, "runs": ns.runs, "seed": seed,
                  "shell_width": ns.shell_width}
    elif c == "threshold":
        params = {"direction": ns.direction, "lam": ns.lam, "r": ns.r, "ladder": ns.L, "runs": ns.runs,
                  "seed": seed}
    elif c == "sweep":
        params = {"direction": ns.direction, "grid": ns.grid, "L": ns.L, "runs": ns.runs, "seed": seed}
    else:
        raise UsageError(f"unknown command {c!r}")
    params = {k: v for k, v in params.items() if v is not None}
    return ExperimentConfig(c, params, fmt, ns.workers)


def _analytic(ns: argparse.Namespace) -> str:
    names = [q.strip() for q in ns.quantity.split(",") if q.strip()]
    for q in names:
        if q not in analytics.QUANTITIES:
            raise ParameterError(f"unknown quantity {q!r}; choose from {', '.join(analytics.QUANTITIES)}")
    if ns.batch is None:
        lines = []
        for q in names:
            fn = analytics.QUANTITIES[q]
            for lam in ns.lam:
                for r in ns.r:
                    for n in ns.n:
                        lines.append(fmt_value(float(fn(lam, r, n))))
        return "\n".join(lines) + "\n"
    with open(ns.batch, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = list(reader.fieldnames or [])
        rows = list(reader)
    if "lambda" not in fields and "r" not in fields:
        raise ParameterError("batch CSV needs a 'lambda' or 'r' column")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields + names)
    for row in rows:
        lam = _real(row.get("lambda") or "0")
        r = _real(row.get("r") or "inf")
        n = int(row.get("n") or 0)
        w.writerow([row[f] for f in fields] + [fmt_value(float(analytics.QUANTITIES[q](lam, r, n))) for q in names])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        if ns.command == "analytic":
            _emit(_analytic(ns), ns.out)
            return 0
        record = run(_config(ns))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    _emit(record.render(), ns.out)
    return 2 if record.failures else 0


if __name__ == "__main__":
    sys.exit(main())
