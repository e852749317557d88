"""
Edge lengths
============

Without a range limit, link lengths follow the nearest-eavesdropper
(Rayleigh) law.  With lam = 0 and range r they have density 2x / r^2.
"""
import math

import numpy as np

from secgraph import SeedSpec, edge_lengths, sample_graph
from secgraph.analytics import reference_densities

s = edge_lengths(sample_graph(0.25, math.inf, 60.0, SeedSpec(5)))
print("edges:", len(s.lengths), " mean length:", round(float(s.lengths.mean()), 4),
      " Rayleigh mean:", reference_densities(0.25).rayleigh_edge_mean)
print("KS distance to Rayleigh:", round(s.ks_distance(), 4), " tail deviation:", round(s.tail_deviation(), 5))

d = edge_lengths(sample_graph(0.0, 1.0, 40.0, SeedSpec(5)))
print("disk graph KS distance to x^2:", round(d.ks_distance(), 4))

hist, bins = np.histogram(s.lengths, bins=8, range=(0, 3), density=True)
ref = reference_densities(0.25).nearest_eaves_pdf(0.5 * (bins[1:] + bins[:-1]))
for lo, h, f in zip(bins, hist, ref):
    print(f"{lo:4.2f}  {h:.3f}  {f:.3f}")
