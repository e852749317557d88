"""Directed, basic and enhanced secrecy graphs and their statistics.

A directed edge x -> y exists iff ``d(x, y) <= r`` and ``d(x, y) < R_x``
where ``R_x`` is the distance from x to its nearest eavesdropper.  An
eavesdropper at exactly ``d(x, y)`` therefore blocks the edge.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .pointprocess import (
    STREAM_EAVES,
    STREAM_GOODS,
    ParameterError,
    PointSet,
    SeedSpec,
    Window,
    _tree,
    add_center_node,
    default_margin,
    distances,
    guard_radii,
    sample_ppp,
)
from .unionfind import UnionFind

# relative padding on tree query radii; exact filtering happens afterwards
_QUERY_PAD = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SecrecyGraph:
    goods: PointSet
    eaves: PointSet
    r: float
    guard: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    lengths: np.ndarray

    @property
    def n(self) -> int:
        return len(self.goods)

    @property
    def n_edges(self) -> int:
        return len(self.indices)

    @property
    def lam(self) -> float:
        return self.eaves.intensity

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), np.diff(self.indptr))

    def edges(self) -> np.ndarray:
        """Directed edges as an (E, 2) array sorted by (source, target)."""
        return np.column_stack([self.sources(), self.indices])

    def adjacency(self) -> csr_matrix:
        data = np.ones(self.n_edges, dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def to_json(self, seed: int | None = None) -> str:
        r = self.r if math.isfinite(self.r) else "inf"
        doc = {
            "params": {"lambda": self.lam, "r": r, "L": self.goods.window.side, "seed": seed},
            "goods": self.goods.points.tolist(),
            "eaves": self.eaves.points.tolist(),
            "out_edges": self.edges().tolist(),
        }
        return json.dumps(doc)


def _csr_from_pairs(n: int, src: np.ndarray, dst: np.ndarray, *extra):
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.intp)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return (indptr, dst) + tuple(e[order] for e in extra)


def build_directed(goods: PointSet, eaves: PointSet, r: float = math.inf) -> SecrecyGraph:
    """Build the directed secrecy graph over ``goods`` with eavesdroppers ``eaves``.

    The metric follows ``goods.window``: minimum-image distances on a torus,
    Euclidean otherwise.  With no eavesdroppers and finite ``r`` this is the
    Gilbert disk graph of radius ``r``.
    """
    if not r > 0:
        raise ParameterError(f"range r must be positive, got {r}")
    if math.isinf(r) and len(eaves) == 0:
        raise ParameterError("r = inf without eavesdroppers gives the complete graph")
    window = goods.window
    n = len(goods)
    guard = guard_radii(goods, eaves, window)
    if n == 0:
        empty = np.empty(0, dtype=np.intp)
        return SecrecyGraph(goods, eaves, r, _readonly(guard), _readonly(np.zeros(1, np.intp)),
                            _readonly(empty), _readonly(np.empty(0)))

    reach = np.minimum(guard, r)
    nb = _tree(goods.points, window).query_ball_point(
        goods.points, reach * (1 + _QUERY_PAD) + 1e-300, return_sorted=False)
    counts = np.fromiter(map(len, nb), dtype=np.intp, count=n)
    src = np.repeat(np.arange(n), counts)
    dst = np.fromiter(itertools.chain.from_iterable(nb), dtype=np.intp, count=int(counts.sum()))
    side = window.side if window.torus else None
    d = distances(goods.points[src], goods.points[dst], side)
    keep = (src != dst) & (d <= r) & (d < guard[src])
    indptr, indices, lengths = _csr_from_pairs(n, src[keep], dst[keep], d[keep])
    return SecrecyGraph(goods, eaves, r, _readonly(guard), _readonly(indptr),
                        _readonly(indices), _readonly(lengths))


@dataclass(frozen=True)
class EdgeSets:
    basic: np.ndarray      # (|E|, 2) pairs i < j present in both directions
    one_way: np.ndarray    # (|E'| - |E|, 2) pairs i < j present in exactly one
    n_directed: int

    @property
    def n_basic(self) -> int:
        return len(self.basic)

    @property
    def n_enhanced(self) -> int:
        return len(self.basic) + len(self.one_way)

    @property
    def enhanced(self) -> np.ndarray:
        pairs = np.vstack([self.basic, self.one_way])
        return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def _reciprocated(g: SecrecyGraph) -> np.ndarray:
    src, dst = g.sources().astype(np.int64), g.indices.astype(np.int64)
    n = max(g.n, 1)
    key = src * n + dst
    rev = dst * n + src
    # keys are sorted because edges are sorted by (src, dst)
    pos = np.searchsorted(key, rev)
    pos = np.minimum(pos, len(key) - 1)
    return key[pos] == rev if len(key) else np.zeros(0, dtype=bool)


def derive_edge_sets(g: SecrecyGraph) -> EdgeSets:
    src, dst = g.sources(), g.indices
    both = _reciprocated(g)
    lo, hi = np.minimum(src, dst), np.maximum(src, dst)
    basic = np.column_stack([src[both & (src < dst)], dst[both & (src < dst)]])
    one = ~both
    one_way = np.column_stack([lo[one], hi[one]])
    one_way = one_way[np.lexsort((one_way[:, 1], one_way[:, 0]))]
    return EdgeSets(basic.reshape(-1, 2), one_way.reshape(-1, 2), g.n_edges)


@dataclass(frozen=True)
class DegreeSummary:
    n_in: np.ndarray
    n_out: np.ndarray
    n_basic: np.ndarray
    n_enhanced: np.ndarray
    counted: np.ndarray = field(repr=False)

    @property
    def n_counted(self) -> int:
        return int(self.counted.sum())

    def mean(self, kind: str) -> float:
        return float(getattr(self, kind)[self.counted].mean())

    def pmf(self, kind: str, nmax: int | None = None) -> np.ndarray:
        vals = getattr(self, kind)[self.counted]
        counts = np.bincount(vals, minlength=(nmax + 1) if nmax is not None else 0)
        if nmax is not None:
            counts = counts[:nmax + 1]
        return counts / max(len(vals), 1)

    def isolation(self, kind: str) -> float:
        return float(np.mean(getattr(self, kind)[self.counted] == 0))

    def totals(self) -> dict[str, int]:
        """Degree sums over all nodes (the mean identity holds exactly for these)."""
        return {k: int(getattr(self, k).sum()) for k in ("n_in", "n_out", "n_basic", "n_enhanced")}


DEGREE_KINDS = ("n_out", "n_in", "n_basic", "n_enhanced")


def interior_mask(g: SecrecyGraph) -> np.ndarray:
    """Nodes whose whole out-neighbourhood disc lies inside the good-node window."""
    w = g.goods.window
    if w.torus:
        return np.ones(g.n, dtype=bool)
    p = g.goods.points
    edge_dist = np.minimum(np.minimum(p[:, 0], w.side - p[:, 0]), np.minimum(p[:, 1], w.side - p[:, 1]))
    return edge_dist >= np.minimum(g.r, g.guard)


def degree_summary(g: SecrecyGraph) -> DegreeSummary:
    """Per-node in/out/basic/enhanced degrees.

    On a torus every node counts; otherwise statistics are restricted to
    :func:`interior_mask`.
    """
    n_out = np.diff(g.indptr)
    n_in = np.bincount(g.indices, minlength=g.n)
    both = _reciprocated(g)
    n_basic = np.bincount(g.sources()[both], minlength=g.n)
    n_enh = n_in + n_out - n_basic
    arrays = [_readonly(a.astype(np.intp)) for a in (n_in, n_out, n_basic, n_enh)]
    return DegreeSummary(*arrays, counted=_readonly(interior_mask(g)))


@dataclass(frozen=True)
class EdgeLengthSample:
    lengths: np.ndarray
    lam: float
    r: float

    def reference_cdf(self):
        """Rayleigh law of the nearest eavesdropper for r = inf, x^2/r^2 for lam = 0."""
        if math.isinf(self.r) and self.lam > 0:
            lam = self.lam
            return lambda x: -np.expm1(-np.pi * lam * np.square(x))
        if self.lam == 0 and math.isfinite(self.r):
            r = self.r
            return lambda x: np.clip(np.square(np.asarray(x) / r), 0.0, 1.0)
        raise ParameterError("reference law only defined for r = inf or lam = 0")

    def ks_distance(self) -> float:
        return float(stats.kstest(self.lengths, self.reference_cdf()).statistic)

    def tail_deviation(self, q: float = 0.95) -> float:
        """Empirical minus reference survival probability at the reference q-quantile."""
        cdf = self.reference_cdf()
        if math.isinf(self.r):
            xq = math.sqrt(-math.log(1 - q) / (math.pi * self.lam))
        else:
            xq = self.r * math.sqrt(q)
        return float(np.mean(self.lengths > xq) - (1 - float(cdf(xq))))


def edge_lengths(g: SecrecyGraph) -> EdgeLengthSample:
    return EdgeLengthSample(_readonly(np.asarray(g.lengths)), g.lam, g.r)


def out_component(g: SecrecyGraph, start: int) -> set[int]:
    """Nodes reachable from ``start`` along directed edges (including ``start``)."""
    if not 0 <= start < g.n:
        raise IndexError(start)
    order = breadth_first_order(g.adjacency(), start, directed=True, return_predecessors=False)
    return set(order.tolist())


def undirected_components(edges: EdgeSets, which: str, n: int) -> np.ndarray:
    """Component label (smallest member index) per node of the basic or enhanced graph."""
    if which not in ("basic", "enhanced"):
        raise ParameterError(f"which must be 'basic' or 'enhanced', got {which!r}")
    pairs = edges.basic if which == "basic" else edges.enhanced
    uf = UnionFind(n)
    for a, b in pairs.tolist():
        uf.union(a, b)
    return uf.labels()


def partition(labels: np.ndarray) -> list[frozenset[int]]:
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(i)
    return [frozenset(v) for _, v in sorted(groups.items())]


def sample_graph(lam: float, r: float, side: float, seed: SeedSpec, boundary: str = "torus",
                 center: bool = False) -> SecrecyGraph:
    """Sample goods (intensity 1) and eavesdroppers (intensity ``lam``) and build the graph.

    ``boundary="torus"`` wraps both processes; ``"inflated"`` draws goods on
    the plain window and eavesdroppers on a window inflated by
    :func:`~secgraph.pointprocess.default_margin`; ``"plain"`` uses the bare
    window for both.
    """
    if boundary == "torus":
        gw = ew = Window(side, "torus")
    elif boundary == "inflated":
        gw = Window(side)
        ew = gw.inflated(default_margin(lam, r, side))
    elif boundary == "plain":
        gw = ew = Window(side)
    else:
        raise ParameterError(f"unknown boundary mode {boundary!r}")
    goods = sample_ppp(1.0, gw, seed, STREAM_GOODS)
    if center:
        goods = add_center_node(goods)
    eaves = sample_ppp(lam, ew, seed, STREAM_EAVES)
    return build_directed(goods, eaves, r)
