"""Poisson point processes in a square window, seeded streams and guard radii.

Good nodes live in ``[0, L)^2``.  Eavesdroppers can be drawn on the same
window, on a torus of side ``L`` or on a window inflated by a margin so that
nearest-eavesdropper distances near the edge are not biased upwards.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

BOUNDARY_MODES = ("plain", "torus", "inflated")

# stream ids used when splitting a run's generator
STREAM_GOODS = 0
STREAM_EAVES = 1
STREAM_MARKS = 2


class ParameterError(ValueError):
    """An argument lies outside the domain of the model."""


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    run_index: int = 0

    def __post_init__(self):
        if self.run_index < 0:
            raise ParameterError("run_index must be >= 0")
        if not 0 <= self.master_seed < 2**64:
            raise ParameterError("master_seed must fit in 64 unsigned bits")

    def generator(self, stream: int = 0) -> np.random.Generator:
        """Counter-based generator keyed by (master_seed, run_index, stream)."""
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.run_index, stream))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Window:
    side: float
    boundary: str = "plain"
    margin: float = 0.0

    def __post_init__(self):
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ParameterError(f"window side must be positive, got {self.side}")
        if self.boundary not in BOUNDARY_MODES:
            raise ParameterError(f"unknown boundary mode {self.boundary!r}")
        if self.margin < 0 or not math.isfinite(self.margin):
            raise ParameterError("margin must be finite and >= 0")
        if self.boundary != "inflated" and self.margin != 0:
            raise ParameterError("margin only applies to inflated windows")

    @property
    def torus(self) -> bool:
        return self.boundary == "torus"

    @property
    def bounds(self) -> tuple[float, float]:
        return -self.margin, self.side + self.margin

    @property
    def area(self) -> float:
        lo, hi = self.bounds
        return (hi - lo) ** 2

    @property
    def center(self) -> tuple[float, float]:
        return self.side / 2, self.side / 2

    def inflated(self, margin: float) -> Window:
        return Window(self.side, "inflated", margin)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        lo, hi = self.bounds
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return np.all((pts >= lo) & (pts < hi) if self.torus else (pts >= lo) & (pts <= hi), axis=1)


def default_margin(lam: float, r: float, side: float) -> float:
    """Inflation margin max(r_finite, 5/sqrt(lam)), the second term capped at L/2."""
    finite_r = r if math.isfinite(r) else 0.0
    if lam <= 0:
        return finite_r
    return max(finite_r, min(5.0 / math.sqrt(lam), side / 2))


def _lexsorted(pts: np.ndarray) -> np.ndarray:
    if len(pts) == 0:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]


@dataclass(frozen=True)
class PointSet:
    """Points of one realisation, sorted by (x, y) so indices are reproducible."""

    points: np.ndarray
    intensity: float
    window: Window
    seed: SeedSpec | None = None
    origin: int | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float).reshape(-1, 2))
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_points(cls, points, window: Window, intensity: float = float("nan")) -> PointSet:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if window.torus:
            pts = np.mod(pts, window.side)
        return cls(_lexsorted(pts), intensity, window)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in self.points:
            w.writerow([f"{x:.17g}", f"{y:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, window: Window) -> PointSet:
        rows = list(csv.DictReader(io.StringIO(text)))
        pts = np.array([[float(r["x"]), float(r["y"])] for r in rows], dtype=float).reshape(-1, 2)
        return cls.from_points(pts, window)


def sample_ppp(intensity: float, window: Window, seed: SeedSpec, stream: int = STREAM_GOODS) -> PointSet:
    """Homogeneous Poisson process of the given intensity on ``window``."""
    if not math.isfinite(intensity) or intensity < 0:
        raise ParameterError(f"intensity must be finite and >= 0, got {intensity}")
    rng = seed.generator(stream)
    count = rng.poisson(intensity * window.area) if intensity > 0 else 0
    lo, hi = window.bounds
    pts = rng.uniform(lo, hi, size=(count, 2))
    return PointSet(_lexsorted(pts), intensity, window, seed)


def add_center_node(ps: PointSet) -> PointSet:
    """Return ``ps`` plus a node at the window centre, recorded as the origin."""
    c = np.array([ps.window.center])
    pts = np.vstack([ps.points, c])
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    origin = int(np.flatnonzero(order == len(pts) - 1)[0])
    return PointSet(pts[order], ps.intensity, ps.window, ps.seed, origin=origin)


def distances(a: np.ndarray, b: np.ndarray, side: float | None = None) -> np.ndarray:
    """Row-wise distance between coordinate arrays; minimum image when ``side`` is given.

    Every distance in the package goes through this function so that fast
    and brute-force code paths agree bit for bit.
    """
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    if side is not None:
        d = np.minimum(d, side - d)
    return np.sqrt(d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1])


def pairwise_distance(p, q, window: Window) -> float:
    side = window.side if window.torus else None
    return float(distances(np.asarray(p, float)[None], np.asarray(q, float)[None], side)[0])


def _tree(pts: np.ndarray, window: Window) -> cKDTree:
    if window.torus:
        return cKDTree(pts, boxsize=window.side)
    return cKDTree(pts)


def guard_radii(goods: PointSet, eaves: PointSet, window: Window | None = None) -> np.ndarray:
    """Distance from each good node to its nearest eavesdropper (inf if there are none).

    The tree only nominates candidates; the reported value is recomputed with
    :func:`distances` so it equals an exhaustive scan exactly.
    """
    window = window or goods.window
    n = len(goods)
    if len(eaves) == 0:
        return np.full(n, np.inf)
    if n == 0:
        return np.empty(0)
    k = min(4, len(eaves))
    _, idx = _tree(eaves.points, window).query(goods.points, k=k)
    idx = np.asarray(idx).reshape(n, k)
    side = window.side if window.torus else None
    d = distances(goods.points[:, None, :], eaves.points[idx], side)
    return d.min(axis=1)

