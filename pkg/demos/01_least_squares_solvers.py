"""Steepest descent and conjugate gradients on a single least-squares problem.

Run: python demos/01_least_squares_solvers.py
"""
import numpy as np

from colinv import CGVariant, Method, SolverConfig, cg_least_squares, sd_least_squares
from colinv.solvers import ls_gradient, ls_objective

rng = np.random.default_rng(1)
A = rng.standard_normal((30, 10))
y = rng.standard_normal(30)
exact = np.linalg.lstsq(A, y, rcond=None)[0]

# the objective and its gradient
b = np.zeros(10)
print("f(0) =", ls_objective(A, b, y), " |grad f(0)| =", np.linalg.norm(ls_gradient(A, b, y)))

# steepest descent with backtracking; stops once |grad f| <= epsilon
sd = sd_least_squares(A, y, SolverConfig(method=Method.SD, epsilon=1e-8), history=True)
print(f"SD: {sd.iterations} iterations, {sd.termination.value}, |x - x*| = {np.linalg.norm(sd.solution - exact):.2e}")
steps = sd.history["step"]
print("  first backtracking steps:", steps[:5])
print("  objective every 50 iterations:", sd.history["objective"][::50])

# CG on the normal equations; stops once the iterate moves less than epsilon
cg = cg_least_squares(A, y, SolverConfig(method=Method.CG, epsilon=1e-10))
print(f"CG: {cg.iterations} iterations, {cg.termination.value}, |x - x*| = {np.linalg.norm(cg.solution - exact):.2e}")

# on a symmetric positive definite system CG can work on A directly
S = A.T @ A + np.eye(10)
rhs = rng.standard_normal(10)
spd = cg_least_squares(S, rhs, SolverConfig(method=Method.CG, epsilon=1e-12, cg_variant=CGVariant.SPD))
print(f"CG (spd): {spd.iterations} iterations, residual {np.linalg.norm(S @ spd.solution - rhs):.2e}")

# a tight iteration cap is reported, not raised
capped = sd_least_squares(A, y, SolverConfig(epsilon=1e-12, max_iters=5))
print("SD capped at 5:", capped.termination.value, f"criterion {capped.final_criterion_value:.3g}")
