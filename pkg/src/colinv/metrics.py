"""Error metrics for inverse/pseudoinverse estimates and the SD error bounds.

All three errors are squared norms of ``estimate - reference``:

* ``err_l2``  squared spectral norm,
* ``err_F``   squared Frobenius norm,
* ``err_rF``  ``err_F / ||reference||_F^2``.

Bound helpers return the guarantees for steepest descent stopped at
``||grad||_2 <= epsilon``. The Frobenius bound for the inverse, ``n eps^2 / 2``,
follows from the column argument only when ``sigma_min(A) >= 1``; for
smaller ``sigma_min`` the same argument gives ``n eps^2 / (2 sigma_min^4)``,
which is reported alongside as ``bound_F_general``. The analogous caveat
applies to the pseudoinverse bound (``sigma_min(A) >= 1``).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InputError
from .linalg import as_matrix, frobenius_norm_sq, is_positive_definite
from .spectral import SpectralSummary, spectral_norm_sq, spectral_summary

log = logging.getLogger(__name__)

# Tolerance used for the sigma estimates that feed the bounds.
BOUND_SIGMA_TOL = 1e-10


@dataclass(frozen=True)
class ErrorReport:
    err_l2: float
    err_F: float
    err_rF: float
    bound_F: float | None = None
    bound_rF: float | None = None
    bound_satisfied: tuple | None = None
    # the bounds are theorems only under their hypothesis; otherwise informative
    hypothesis_holds: bool | None = None
    bound_F_general: float | None = None
    sigma_tol: float | None = None
    err_l2_converged: bool = True

    def as_row(self) -> dict:
        return {
            "err_l2": self.err_l2,
            "err_F": self.err_F,
            "err_rF": self.err_rF,
            "bound_F": self.bound_F,
            "bound_rF": self.bound_rF,
        }


def error_report(reference, estimate) -> ErrorReport:
    reference = np.asarray(reference, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if reference.shape != estimate.shape:
        raise InputError(f"shape mismatch: reference {reference.shape}, estimate {estimate.shape}")
    D = estimate - reference
    err_F = frobenius_norm_sq(D)
    ref = frobenius_norm_sq(reference)
    if ref == 0.0:
        raise InputError("reference matrix is zero")
    err_l2, ok = spectral_norm_sq(D, max_iter=1000)
    # power iteration approaches from below; clamp rounding above the Frobenius value
    err_l2 = min(err_l2, err_F)
    return ErrorReport(err_l2=err_l2, err_F=err_F, err_rF=err_F / ref, err_l2_converged=ok)


def _summary(A, summary):
    return summary if summary is not None else spectral_summary(A, tol=BOUND_SIGMA_TOL)


def prop1_bounds(A, epsilon: float, summary: SpectralSummary | None = None):
    """(n eps^2 / 2, (n eps^2 / 2) / sigma_min^2) for an n×n matrix."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got {A.shape}")
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    s = _summary(A, summary)
    bound_F = A.shape[0] * epsilon**2 / 2.0
    bound_rF = bound_F / s.sigma_min**2 if s.sigma_min > 0 else math.inf
    return bound_F, bound_rF


def corollary_bounds(A, epsilon: float, summary: SpectralSummary | None = None):
    """(m (eps kappa / (sqrt2 sigma_min))^2, m eps^2 kappa^2 / 2) for an n×m matrix, n > m."""
    A = as_matrix(A)
    n, m = A.shape
    if n <= m:
        raise InputError(f"expected a tall matrix (n > m), got {A.shape}")
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    s = _summary(A, summary)
    if s.sigma_min == 0:
        return math.inf, math.inf
    bound_F = m * (epsilon * s.kappa2 / (math.sqrt(2.0) * s.sigma_min)) ** 2
    bound_rF = m * epsilon**2 * s.kappa2**2 / 2.0
    return bound_F, bound_rF


def column_residuals_sq(A, estimate) -> np.ndarray:
    """||A b_i - e_i||^2 for every column b_i of an inverse estimate."""
    A = np.asarray(A)
    R = A @ np.asarray(estimate) - np.eye(A.shape[0])
    return np.sum(R * R, axis=0)


def residual_bound(sigma_min: float, epsilon: float) -> float:
    """Per-column bound (eps / sigma_min)^2 / 2 on ||A b_i - e_i||^2."""
    return 0.5 * (epsilon / sigma_min) ** 2 if sigma_min > 0 else math.inf


def additive_bound(A, estimate, summary: SpectralSummary | None = None) -> float:
    """kappa^2 + sigma_max^2 (1 + mean ||b_i||^2); loose, for display only."""
    s = _summary(A, summary)
    est = np.asarray(estimate)
    mean_sq = float(np.mean(np.sum(est * est, axis=0)))
    return s.kappa2**2 + s.sigma_max**2 * (1.0 + mean_sq)


def check_prop1(A, estimate, epsilon: float, reference, summary: SpectralSummary | None = None) -> ErrorReport:
    """Errors of an inverse estimate next to the SD guarantee.

    ``hypothesis_holds`` records whether A is symmetric positive definite;
    when it is not, the flags are informative only.
    """
    A = as_matrix(A)
    s = _summary(A, summary)
    report = error_report(reference, estimate)
    bound_F, bound_rF = prop1_bounds(A, epsilon, s)
    general = A.shape[0] * epsilon**2 / (2.0 * s.sigma_min**4) if s.sigma_min > 0 else math.inf
    log.debug(
        "strong-convexity constant 2 sigma_min^2 tightens the column residual bound to %.3e",
        0.25 * (epsilon / s.sigma_min) ** 2 if s.sigma_min > 0 else math.inf,
    )
    return replace(
        report,
        bound_F=bound_F,
        bound_rF=bound_rF,
        bound_satisfied=(report.err_F <= bound_F, report.err_rF <= bound_rF),
        hypothesis_holds=is_positive_definite(A),
        bound_F_general=general,
        sigma_tol=s.tol,
    )


def check_corollary(A, estimate, epsilon: float, reference, summary: SpectralSummary | None = None) -> ErrorReport:
    """Errors of a pseudoinverse estimate next to the SD guarantee."""
    A = as_matrix(A)
    s = _summary(A, summary)
    report = error_report(reference, estimate)
    bound_F, bound_rF = corollary_bounds(A, epsilon, s)
    m = A.shape[1]
    general = m * epsilon**2 * s.kappa2**2 / (2.0 * s.sigma_min**6) if s.sigma_min > 0 else math.inf
    return replace(
        report,
        bound_F=bound_F,
        bound_rF=bound_rF,
        bound_satisfied=(report.err_F <= bound_F, report.err_rF <= bound_rF),
        hypothesis_holds=A.shape[0] > m and s.sigma_min > 0,
        bound_F_general=general,
        sigma_tol=s.tol,
    )
