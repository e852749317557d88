"""
Secrecy graphs on the square lattice
====================================

Eavesdroppers occupy edge midpoints or sites with probability p.  Under
the analogy rule this is bond or site percolation, with thresholds near
1/2 and 0.41 for the occupation probability.
"""
import numpy as np

from secgraph import SeedSpec, build_lattice_graph, crosses, estimate_pc, gen_config

cfg = gen_config(16, 0.3, "sites", SeedSpec(4))
analogy = build_lattice_graph(cfg, "analogy")
geometric = build_lattice_graph(cfg, "geometric")
print("open edges (analogy):", int(analogy.enhanced.sum()),
      " geometric basic equals analogy:", np.array_equal(geometric.basic, analogy.basic))
print("geometric enhanced edges:", int(geometric.enhanced.sum()))
print("crosses horizontally:", crosses(analogy))

for placement in ("midpoints", "sites"):
    est = estimate_pc(placement, "analogy", (64,), runs=60, master_seed=1)
    print(f"{placement:9s} p_c ~ {est.value:.3f}  [{est.ci_lo:.3f}, {est.ci_hi:.3f}]")
