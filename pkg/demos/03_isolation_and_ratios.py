"""
Isolation probabilities and secrecy ratios
==========================================

A node is out-isolated with probability lam / (lam + 1) when r = inf.
The in-degree and the enhanced degree are zero less often.
"""
import math

import numpy as np

from secgraph import analytics
from secgraph.experiments import ExperimentConfig, cmd_isolation

rec = cmd_isolation(ExperimentConfig("isolation", {"lams": [0.2, 1.0], "r": math.inf, "L": 60.0,
                                                   "runs": 5, "seed": 2}))
for row in rec.rows:
    print(f"lam={row['lambda']}: out {row['emp_out']:.3f} (analytic {row['analytic_out']:.3f}), "
          f"in {row['emp_in']:.3f}, basic {row['emp_basic']:.3f}, enhanced {row['emp_enhanced']:.3f}")

# the closed form c lam / (c lam + 1) for the basic graph overshoots the simulation
print("c lam / (c lam + 1) at lam = 1:", round(analytics.basic_isolation(1.0), 4))

# secrecy ratios fall with both r and lam
for lam in (0.05, 0.5):
    etas = [analytics.secrecy_ratios(lam, r)[0] for r in np.linspace(0.5, 4, 8)]
    print(f"eta(lam={lam}) over r:", np.round(etas, 3))

# the basic-to-enhanced mean degree ratio tends to 1/(2c - 1)
eta, eta_p = analytics.secrecy_ratios(10.0, 20.0)
print("E N / E N' at large lam r^2:", round(eta / eta_p, 4), " limit", round(analytics.basic_to_enhanced_floor(), 4))
