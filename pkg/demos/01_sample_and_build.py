"""
Sampling a secrecy graph
========================

Legitimate nodes (intensity 1) and eavesdroppers (intensity lam) are drawn
as Poisson processes.  Node x may talk to y when y is within range and
closer than x's nearest eavesdropper.
"""
import math

import numpy as np

from secgraph import SeedSpec, degree_summary, derive_edge_sets, sample_graph

# one realisation on a 30 x 30 torus, no range limit
g = sample_graph(lam=0.2, r=math.inf, side=30.0, seed=SeedSpec(master_seed=1))
print("good nodes:", g.n, " eavesdroppers:", len(g.eaves), " directed edges:", g.n_edges)

# basic edges exist in both directions, enhanced edges in at least one
es = derive_edge_sets(g)
print("basic:", es.n_basic, " enhanced:", es.n_enhanced, " basic + enhanced:", es.n_basic + es.n_enhanced)

# per-node degrees; the basic degree never exceeds in- or out-degree
s = degree_summary(g)
for kind in ("n_out", "n_in", "n_basic", "n_enhanced"):
    print(f"mean {kind:<10s} {s.mean(kind):6.3f}   isolated {s.isolation(kind):.3f}")

# the guard radius of a node caps the length of its out-edges
i = int(np.argmax(np.diff(g.indptr)))
print("busiest node", i, "guard radius", round(float(g.guard[i]), 3),
      "longest out-edge", round(float(g.lengths[g.indptr[i]:g.indptr[i + 1]].max()), 3))

# the whole realisation serialises to JSON
print(g.to_json(seed=1)[:120], "...")
