"""Tolerance-to-accuracy bounds and where their hypothesis matters.

Run: python demos/04_error_bounds.py
"""
import numpy as np

from colinv import SolverConfig, check_corollary, check_prop1, direct_inverse_oracle, direct_pseudoinverse_oracle
from colinv import estimate_inverse, estimate_pseudoinverse, spectral_summary
from colinv.metrics import column_residuals_sq, residual_bound

CAP = 1_000_000
rng = np.random.default_rng(4)

# SPD with sigma_min >= 1: every column stops with err_F below n eps^2 / 2
G = rng.standard_normal((20, 20))
A = G @ G.T / 20 + np.eye(20)
s = spectral_summary(A)
for eps in (1e-2, 1e-4):
    est = estimate_inverse(A, SolverConfig(epsilon=eps, max_iters=CAP))
    rep = check_prop1(A, est.matrix, eps, direct_inverse_oracle(A), s)
    print(f"eps={eps:.0e} err_F={rep.err_F:.2e} <= {rep.bound_F:.2e}: {rep.bound_satisfied[0]}"
          f"  err_rF={rep.err_rF:.2e} <= {rep.bound_rF:.2e}: {rep.bound_satisfied[1]}")
    res = column_residuals_sq(A, est.matrix)
    print(f"  worst column residual {res.max():.2e} <= {residual_bound(s.sigma_min, eps):.2e}")

# 1x1 counterexample: a = 0.1 is SPD but sigma_min < 1; n eps^2 / 2 fails, n eps^2 / (2 sigma_min^4) holds
a = np.array([[0.1]])
eps = 1e-2
est = estimate_inverse(a, SolverConfig(epsilon=eps, max_iters=CAP))
rep = check_prop1(a, est.matrix, eps, np.array([[10.0]]))
print(f"a=0.1: err_F={rep.err_F:.3g} vs bound {rep.bound_F:.3g} (hypothesis holds: {rep.hypothesis_holds});"
      f" general bound {rep.bound_F_general:.3g}")

# tall Gaussian matrix: the pseudoinverse bound
B = rng.standard_normal((60, 30))
for eps in (1e-2, 1e-4):
    est = estimate_pseudoinverse(B, SolverConfig(epsilon=eps, max_iters=CAP))
    rep = check_corollary(B, est.matrix, eps, direct_pseudoinverse_oracle(B))
    print(f"pinv eps={eps:.0e} err_F={rep.err_F:.2e} <= {rep.bound_F:.2e}: {rep.bound_satisfied[0]}")
