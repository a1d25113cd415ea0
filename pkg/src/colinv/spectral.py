"""Extreme singular values by power iteration.

``sigma_max`` comes from power iteration on AᵀA and ``sigma_min`` from
inverse power iteration on AᵀA with conjugate-gradient inner solves. Both
report their value through the Rayleigh quotient ``||Av||^2`` of the current
unit vector, so ``sigma_min`` is never underestimated and ``sigma_max`` never
overestimated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BreakdownError, InputError
from .linalg import as_matrix, gram
from .solvers import CGVariant, Method, SolverConfig, solve_many

_MACHINE_EPS = np.finfo(np.float64).eps


@dataclass(frozen=True)
class SpectralSummary:
    sigma_min: float
    sigma_max: float
    kappa2: float
    converged: bool = True
    iterations: tuple = (0, 0)
    tol: float = 0.0

    @property
    def termination(self) -> str:
        return "converged" if self.converged else "max_iters_reached"


def _start_vector(n: int) -> np.ndarray:
    v = np.random.default_rng(0x5EED).standard_normal(n)
    return v / np.linalg.norm(v)


def _power(apply, v, tol, max_iter):
    lam = None
    for it in range(1, max_iter + 1):
        w = apply(v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, v, True, it
        v = w / nw
        new = apply.rayleigh(v)
        if lam is not None and abs(new - lam) <= tol * abs(new):
            return new, v, True, it
        lam = new
    return lam, v, False, max_iter


class _Gram:
    def __init__(self, A):
        self.A = A

    def __call__(self, v):
        return self.A.T @ (self.A @ v)

    def rayleigh(self, v):
        Av = self.A @ v
        return float(Av @ Av)


class _InverseGram(_Gram):
    def __init__(self, A, inner_iters):
        super().__init__(A)
        self.B = gram(A)
        self.inner_iters = inner_iters
        self.scale = None

    def __call__(self, v):
        # target a displacement far below the size of the solution
        eps = 1e-15 * (self.scale or 1.0 / np.max(np.abs(np.diag(self.B))))
        cfg = SolverConfig(method=Method.CG, epsilon=eps, max_iters=self.inner_iters, cg_variant=CGVariant.SPD)
        w = solve_many(self.B, v[:, None], cfg)[0][0].solution
        self.scale = float(np.linalg.norm(w))
        return w


def spectral_norm_sq(D, tol: float = 1e-12, max_iter: int = 1000):
    """Squared spectral norm of D by power iteration on DᵀD.

    Returns ``(value, converged)``; an unconverged value is a lower bound.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2:
        raise InputError(f"expected a matrix, got shape {D.shape}")
    if not np.any(D):
        return 0.0, True
    M = D if D.shape[1] <= D.shape[0] else D.T
    lam, _, ok, _ = _power(_Gram(M), _start_vector(M.shape[1]), tol, max_iter)
    return float(lam), ok


def spectral_summary(A, tol: float = 1e-10, max_iter: int = 1000) -> SpectralSummary:
    """sigma_min, sigma_max and kappa_2 of a (full-rank) matrix.

    A smallest singular value below working precision relative to the
    largest is reported as 0 with ``kappa2 = inf``.
    """
    A = as_matrix(A)
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    M = A if A.shape[0] >= A.shape[1] else A.T
    n = M.shape[1]
    lam_max, _, ok_max, it_max = _power(_Gram(M), _start_vector(n), tol, max_iter)
    sigma_max = float(np.sqrt(lam_max))
    if sigma_max == 0.0:
        return SpectralSummary(0.0, 0.0, float("inf"), ok_max, (it_max, 0), tol)
    floor = n * _MACHINE_EPS * sigma_max
    try:
        lam_min, _, ok_min, it_min = _power(_InverseGram(M, 20 * n), _start_vector(n), tol, max_iter)
    except BreakdownError:
        return SpectralSummary(0.0, sigma_max, float("inf"), ok_max, (it_max, 0), tol)
    sigma_min = float(np.sqrt(max(lam_min, 0.0)))
    if sigma_min <= floor:
        return SpectralSummary(0.0, sigma_max, float("inf"), ok_max and ok_min, (it_max, it_min), tol)
    sigma_min = min(sigma_min, sigma_max)
    return SpectralSummary(sigma_min, sigma_max, sigma_max / sigma_min, ok_max and ok_min, (it_max, it_min), tol)
