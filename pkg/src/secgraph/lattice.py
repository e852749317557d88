"""Secrecy graphs on the n x n square lattice.

Eavesdroppers sit either at edge midpoints or on the sites themselves, each
location occupied independently with probability p.  Sites are indexed
``i * n + j`` (row i, column j); edges are the n(n-1) horizontal edges
(i, j)-(i, j+1) followed by the n(n-1) vertical edges (i, j)-(i+1, j), and a
midpoint shares the index of its edge.

Two rules turn a configuration into open edges:

``analogy``
    midpoints: an edge is open iff its own midpoint is empty (bond
    percolation); sites: an edge is open iff both end sites are empty (site
    percolation).
``geometric``
    the eavesdropper rule applied literally.  Node x loses all out-edges
    when an eavesdropper lies within distance 1 of it (strictly, for
    ``ball="open"``; ``ball="closed"`` also counts distance exactly 1).
    Basic edges need both ends unblocked, enhanced edges at least one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .pointprocess import ParameterError, SeedSpec
from .unionfind import UnionFind

PLACEMENTS = ("edge_midpoints", "sites")
RULES = ("analogy", "geometric")
_PLACEMENT_ALIASES = {"midpoints": "edge_midpoints", "edge_midpoints": "edge_midpoints", "sites": "sites"}
_RULE_ALIASES = {"analogy": "analogy", "geometric": "geometric", "geometric_strict": "geometric"}


def _placement(name: str) -> str:
    try:
        return _PLACEMENT_ALIASES[name]
    except KeyError:
        raise ParameterError(f"unknown placement {name!r}") from None


def _rule(name: str) -> str:
    try:
        return _RULE_ALIASES[name]
    except KeyError:
        raise ParameterError(f"unknown rule {name!r}") from None


def edge_endpoints(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Site indices (a, b) of every lattice edge in canonical order."""
    idx = np.arange(n * n).reshape(n, n)
    ha, hb = idx[:, :-1].ravel(), idx[:, 1:].ravel()
    va, vb = idx[:-1, :].ravel(), idx[1:, :].ravel()
    return np.concatenate([ha, va]), np.concatenate([hb, vb])


def n_locations(n: int, placement: str) -> int:
    return 2 * n * (n - 1) if _placement(placement) == "edge_midpoints" else n * n


@dataclass(frozen=True)
class LatticeConfig:
    n: int
    p: float
    placement: str
    occupancy: np.ndarray
    seed: SeedSpec | None = None

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancy, dtype=bool)
        if len(occ) != n_locations(self.n, self.placement):
            raise ParameterError("occupancy length does not match the lattice")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)


def _marks(n: int, placement: str, seed: SeedSpec) -> np.ndarray:
    return seed.generator(0).random(n_locations(n, placement))


def gen_config(n: int, p: float, placement: str, seed: SeedSpec) -> LatticeConfig:
    """Occupy each candidate location independently with probability p.

    Occupancy is ``U < p`` for per-location uniforms U drawn from ``seed``,
    so configurations with the same seed are nested in p.
    """
    if n < 2:
        raise ParameterError("lattice side must be >= 2")
    if not 0 <= p <= 1:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    placement = _placement(placement)
    return LatticeConfig(n, p, placement, _marks(n, placement, seed) < p, seed)


@dataclass(frozen=True)
class LatticeGraph:
    n: int
    rule: str
    basic: np.ndarray       # open-edge bits, canonical edge order
    enhanced: np.ndarray
    blocked: np.ndarray | None = field(default=None, repr=False)  # geometric rule: sites without out-edges

    def open_edges(self, which: str = "enhanced") -> np.ndarray:
        if which not in ("basic", "enhanced"):
            raise ParameterError(f"which must be 'basic' or 'enhanced', got {which!r}")
        return self.basic if which == "basic" else self.enhanced

    def directed_open(self) -> tuple[np.ndarray, np.ndarray]:
        """(a->b open, b->a open) per edge; only meaningful for the geometric rule."""
        if self.blocked is None:
            return self.basic, self.basic
        a, b = edge_endpoints(self.n)
        return ~self.blocked[a], ~self.blocked[b]


def blocked_sites(cfg: LatticeConfig, ball: str = "open") -> np.ndarray:
    """Sites with an eavesdropper inside the ball of radius 1 around them."""
    if ball not in ("open", "closed"):
        raise ParameterError(f"ball must be 'open' or 'closed', got {ball!r}")
    n = cfg.n
    occ = cfg.occupancy
    if cfg.placement == "edge_midpoints":
        # incident midpoints are at distance 1/2; the next ones at sqrt(5)/2 > 1
        a, b = edge_endpoints(n)
        blocked = np.zeros(n * n, dtype=bool)
        blocked[a[occ]] = True
        blocked[b[occ]] = True
        return blocked
    grid = occ.reshape(n, n)
    if ball == "open":
        return grid.ravel().copy()
    out = grid.copy()
    out[1:, :] |= grid[:-1, :]
    out[:-1, :] |= grid[1:, :]
    out[:, 1:] |= grid[:, :-1]
    out[:, :-1] |= grid[:, 1:]
    return out.ravel()


def build_lattice_graph(cfg: LatticeConfig, rule: str = "analogy", ball: str = "open") -> LatticeGraph:
    rule = _rule(rule)
    n = cfg.n
    a, b = edge_endpoints(n)
    if rule == "analogy":
        if cfg.placement == "edge_midpoints":
            open_ = ~cfg.occupancy
        else:
            free = ~cfg.occupancy
            open_ = free[a] & free[b]
        open_ = np.ascontiguousarray(open_)
        open_.setflags(write=False)
        return LatticeGraph(n, rule, open_, open_)
    blocked = blocked_sites(cfg, ball)
    basic = ~blocked[a] & ~blocked[b]
    enhanced = ~blocked[a] | ~blocked[b]
    for arr in (basic, enhanced, blocked):
        arr.setflags(write=False)
    return LatticeGraph(n, rule, basic, enhanced, blocked)


def _boundary_sets(n: int, direction: str) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(n * n).reshape(n, n)
    if direction == "horizontal":
        return idx[:, 0], idx[:, -1]
    if direction == "vertical":
        return idx[0, :], idx[-1, :]
    raise ParameterError(f"direction must be horizontal or vertical, got {direction!r}")


def crosses(g: LatticeGraph, direction: str = "horizontal", which: str = "enhanced") -> bool:
    """True iff an open cluster joins the two opposite sides of the lattice."""
    n = g.n
    first, last = _boundary_sets(n, direction)
    first_side, last_side = n * n, n * n + 1
    uf = UnionFind(n * n + 2)
    for s in first.tolist():
        uf.union(first_side, s)
    for s in last.tolist():
        uf.union(last_side, s)
    a, b = edge_endpoints(n)
    mask = g.open_edges(which)
    for x, y in zip(a[mask].tolist(), b[mask].tolist()):
        uf.union(x, y)
    return uf.connected(first_side, last_side)


crossing_probability = crosses


def edge_thresholds(n: int, placement: str, rule: str, marks: np.ndarray,
                    which: str = "enhanced", ball: str = "open") -> np.ndarray:
    """Largest p at which each edge is still open, given the location marks.

    Location k is occupied iff ``marks[k] < p``, so every rule reduces to
    "edge e is open iff p <= t_e" for a per-edge threshold t_e.
    """
    placement, rule = _placement(placement), _rule(rule)
    a, b = edge_endpoints(n)
    if rule == "analogy":
        if placement == "edge_midpoints":
            return marks.copy()
        return np.minimum(marks[a], marks[b])
    # a site stays unblocked while p <= smallest mark within its ball
    if placement == "edge_midpoints":
        site_t = np.ones(n * n)
        np.minimum.at(site_t, a, marks)
        np.minimum.at(site_t, b, marks)
    elif ball == "open":
        site_t = marks.copy()
    else:
        grid = marks.reshape(n, n)
        t = grid.copy()
        t[1:, :] = np.minimum(t[1:, :], grid[:-1, :])
        t[:-1, :] = np.minimum(t[:-1, :], grid[1:, :])
        t[:, 1:] = np.minimum(t[:, 1:], grid[:, :-1])
        t[:, :-1] = np.minimum(t[:, :-1], grid[:, 1:])
        site_t = t.ravel()
    if which == "basic":
        return np.minimum(site_t[a], site_t[b])
    return np.maximum(site_t[a], site_t[b])


def crossing_threshold(n: int, placement: str, rule: str, seed: SeedSpec, direction: str = "horizontal",
                       which: str = "enhanced", ball: str = "open") -> float:
    """Largest p at which the configuration drawn from ``seed`` still crosses.

    Edges are opened in decreasing order of their threshold and merged with
    union-find until the two sides connect.  ``crosses(build(gen_config(p)))``
    is True exactly for p up to the returned value.
    """
    placement = _placement(placement)
    t = edge_thresholds(n, placement, rule, _marks(n, placement, seed), which, ball)
    a, b = edge_endpoints(n)
    first, last = _boundary_sets(n, direction)
    first_side, last_side = n * n, n * n + 1
    uf = UnionFind(n * n + 2)
    for s in first.tolist():
        uf.union(first_side, s)
    for s in last.tolist():
        uf.union(last_side, s)
    order = np.argsort(-t, kind="stable")
    find, union = uf.find, uf.union
    for e, x, y in zip(order.tolist(), a[order].tolist(), b[order].tolist()):
        union(x, y)
        if find(first_side) == find(last_side):
            return float(t[e])
    return 0.0


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    if trials <= 0:
        raise ParameterError("need at least one trial")
    ci = stats.binomtest(successes, trials).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class CrossingRow:
    p: float
    n: int
    crossing_fraction: float
    ci_lo: float
    ci_hi: float


def crossing_fraction(n: int, p: float, placement: str, rule: str, runs: int, master_seed: int,
                      which: str = "enhanced", ball: str = "open") -> CrossingRow:
    hits = 0
    for k in range(runs):
        cfg = gen_config(n, p, placement, SeedSpec(master_seed, k))
        hits += crosses(build_lattice_graph(cfg, rule, ball), "horizontal", which)
    lo, hi = wilson_interval(hits, runs)
    return CrossingRow(p, n, hits / runs, lo, hi)


def estimate_pc(placement: str, rule: str = "analogy", n_ladder=(64, 128, 256), runs: int = 200,
                master_seed: int = 0, which: str = "enhanced", ball: str = "open", tol: float = 5e-3):
    """Threshold p at which the horizontal crossing fraction falls through 1/2.

    Every run contributes its exact crossing threshold; the coupled crossing
    fraction is bisected on [0, 1] for each lattice size and the largest
    size is reported with the ladder in ``method``.
    """
    from .thresholds import combine_ladder, summarize

    if runs < 30:
        raise ParameterError("need at least 30 runs per lattice size")
    per_size = {}
    for n in n_ladder:
        t = np.array([crossing_threshold(n, placement, rule, SeedSpec(master_seed, k), "horizontal", which, ball)
                      for k in range(runs)])
        per_size[n] = summarize(t, 0.0, 1.0, increasing=False, direction="p_c", seed=master_seed + n, tol=tol,
                                method={"placement": _placement(placement), "rule": _rule(rule), "which": which,
                                        "ball": ball, "n": n})
    return combine_ladder(per_size, "p_c")
