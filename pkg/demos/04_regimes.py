"""
Power-limited and secrecy-limited regimes
=========================================

The mean out-degree grows like pi r^2 for small r and saturates at 1/lam.
The switch happens around r_T = (2 pi lam)^(-1/2).
"""
from secgraph import analytics
from secgraph.experiments import ExperimentConfig, cmd_regimes

lam = 0.1
reg = analytics.regime_descriptors(lam)
print("r_T =", round(reg.r_T, 4), " steepest slope =", round(reg.slope, 4))
print("r_0.01 =", round(reg.r_eps(0.01), 4), " mean out-degree there:",
      round(analytics.mean_out_degree(lam, reg.r_eps(0.01)), 3), "of", 1 / lam)

rec = cmd_regimes(ExperimentConfig("regimes", {"lam": lam, "rs": [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]}))
for row in rec.rows:
    print(f"r={row['r']:5.2f}  mean {row['mean_out']:6.3f}  bound {row['piecewise_bound']:6.3f}  {row['regime']}")

# a range from a transmit power budget, path-loss exponent 4
print("range for P=16, Theta=1, W=1, alpha=4:", analytics.range_from_power(16, 1, 1, 4))
