"""Left pseudoinverse of a tall full-rank matrix, row by row.

Run: python demos/03_pseudoinverse.py
"""
import numpy as np

from colinv import (
    CGVariant,
    Method,
    SolverConfig,
    direct_pseudoinverse_oracle,
    error_report,
    estimate_pseudoinverse,
    estimate_pseudoinverse_sweep,
)

CAP = 1_000_000

rng = np.random.default_rng(3)
A = rng.standard_normal((40, 15))
ref = direct_pseudoinverse_oracle(A)

# rows of (AᵀA)⁻¹ are found by the column solver on AᵀA, then multiplied by Aᵀ
est = estimate_pseudoinverse(A, SolverConfig(epsilon=1e-9, max_iters=CAP))
print("shape", est.matrix.shape, " iterations", est.iterations)
print("left inverse check |A⁺A - I|_F =", np.linalg.norm(est.matrix @ A - np.eye(15)))
r = error_report(ref, est.matrix)
print(f"err_l2={r.err_l2:.2e} err_F={r.err_F:.2e} err_rF={r.err_rF:.2e}")

for e, x in zip((1e-3, 1e-6, 1e-9), estimate_pseudoinverse_sweep(A, SolverConfig(max_iters=CAP), (1e-3, 1e-6, 1e-9))):
    print(f"  eps={e:.0e} err_F={error_report(ref, x.matrix).err_F:.2e}")

# AᵀA is symmetric positive definite, so the plain CG recursion applies
cg = estimate_pseudoinverse(A, SolverConfig(method=Method.CG, epsilon=1e-10, cg_variant=CGVariant.SPD))
print("CG iterations", cg.iterations, f" err_F {error_report(ref, cg.matrix).err_F:.2e}")
