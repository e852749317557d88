"""Threshold estimates from coupled per-run critical values.

Each Monte Carlo run is monotone in the control parameter, so it has its own
critical value.  The fraction of runs that percolate at x is then an exact
step function, and bisecting it against 1/2 locates the crossing.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

DIRECTIONS = ("lambda_c_of_r", "r_c_of_lambda", "lambda_inf", "gilbert_r", "p_c")


class BracketError(RuntimeError):
    """The search interval does not contain the 1/2 crossing."""

    def __init__(self, message: str, trace: list):
        super().__init__(f"{message}; probes: {trace}")
        self.trace = trace


@dataclass(frozen=True)
class ThresholdEstimate:
    value: float
    ci_lo: float
    ci_hi: float
    direction: str
    method: dict = field(default_factory=dict)
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"value": self.value, "ci_lo": self.ci_lo, "ci_hi": self.ci_hi,
                "direction": self.direction, "method": self.method, "flags": list(self.flags)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def crossing_fraction(thresholds: np.ndarray, x: float, increasing: bool) -> float:
    """Fraction of runs percolating at x.

    ``increasing=False``: run i percolates for x <= t_i (p, lambda).
    ``increasing=True``: run i percolates for x >= t_i (r).
    """
    t = np.asarray(thresholds)
    return float(np.mean(t <= x) if increasing else np.mean(t >= x))


def bisect_half(thresholds: np.ndarray, lo: float, hi: float, increasing: bool,
                tol: float = 5e-3) -> tuple[float, list[tuple[float, float]]]:
    """Bisection of the coupled crossing fraction against 1/2 on [lo, hi]."""
    trace = []
    f_lo = crossing_fraction(thresholds, lo, increasing)
    f_hi = crossing_fraction(thresholds, hi, increasing)
    trace += [(lo, f_lo), (hi, f_hi)]
    below, above = (lo, hi) if increasing else (hi, lo)  # fraction < 1/2 at `below`
    if not (crossing_fraction(thresholds, below, increasing) < 0.5 <=
            crossing_fraction(thresholds, above, increasing)):
        raise BracketError("crossing fraction does not straddle 1/2", trace)
    a, b = lo, hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        f = crossing_fraction(thresholds, mid, increasing)
        trace.append((mid, f))
        if (f >= 0.5) == increasing:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b), trace


def median_ci(thresholds: np.ndarray, seed: int, level: float = 0.95) -> tuple[float, float]:
    t = np.asarray(thresholds, dtype=float)
    if len(t) < 2 or np.ptp(t) == 0:
        m = float(np.median(t))
        return m, m
    res = stats.bootstrap((t,), np.median, confidence_level=level, n_resamples=2000,
                          method="percentile", random_state=np.random.default_rng(seed))
    return float(res.confidence_interval.low), float(res.confidence_interval.high)


def summarize(thresholds: np.ndarray, lo: float, hi: float, increasing: bool, direction: str,
              seed: int, tol: float, method: dict | None = None) -> ThresholdEstimate:
    value, trace = bisect_half(thresholds, lo, hi, increasing, tol)
    ci_lo, ci_hi = median_ci(thresholds, seed)
    q25, q75 = np.percentile(thresholds, [25, 75])
    meta = {"runs": len(thresholds), "bracket": [lo, hi], "tol": tol,
            "probes": [[round(x, 12), f] for x, f in trace],
            "iqr": float(q75 - q25)}
    meta.update(method or {})
    return ThresholdEstimate(value, min(ci_lo, value), max(ci_hi, value), direction, meta)


def combine_ladder(per_size: dict[int, ThresholdEstimate], direction: str) -> ThresholdEstimate:
    """Report the largest window's estimate with the whole ladder as metadata."""
    sizes = sorted(per_size)
    top = per_size[sizes[-1]]
    values = [per_size[s].value for s in sizes]
    method = dict(top.method)
    method["ladder"] = {str(s): {"value": per_size[s].value, "ci": [per_size[s].ci_lo, per_size[s].ci_hi],
                                 "iqr": per_size[s].method.get("iqr")} for s in sizes}
    method["drift"] = values[-1] - values[0] if len(values) > 1 else 0.0
    flags = tuple(sorted({f for e in per_size.values() for f in e.flags}))
    return ThresholdEstimate(top.value, top.ci_lo, top.ci_hi, direction, method, flags)


def fmt_inf(x: float):
    return "inf" if isinstance(x, float) and math.isinf(x) else x
