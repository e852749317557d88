"""
Percolation thresholds
======================

A sample percolates when the out-component of the central node reaches
the boundary shell.  Thresholds come from coupled per-run bisection;
this demo uses small windows, so expect finite-size offsets.
"""
import math

from secgraph import PercRunParams, estimate_lambda_c, estimate_r_c, estimate_theta
from secgraph.analytics import R_GILBERT_REF, critical_lambda_approx

for lam in (0.05, 0.3):
    th = estimate_theta(PercRunParams(lam, math.inf, 90.0, 30, master_seed=1))
    print(f"theta(lam={lam}, r=inf) ~ {th.theta_hat:.2f}  CI {th.ci[0]:.2f}..{th.ci[1]:.2f}")

rg = estimate_r_c(0.0, ladder=(40,), runs_per_probe=40, master_seed=2)
print("Gilbert radius ~", round(rg.value, 3), " reference", R_GILBERT_REF)

lc = estimate_lambda_c(2.0, ladder=(40,), runs_per_probe=40, master_seed=3)
print("lambda_c(2) ~", round(lc.value, 4), " fitted curve", round(critical_lambda_approx(2.0), 4))
print(lc.to_json()[:160], "...")
