"""Dense matrix helpers shared by every other module.

Matrices are plain ``float64`` numpy arrays in C (row-major) order; vectors
are 1-D ``float64`` arrays. The helpers here validate shape and finiteness
once at the boundary so the solvers can stay lean.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError, SingularMatrixError

# Relative pivot threshold of the elimination oracle.
PIVOT_RTOL = 1e-12


def as_matrix(a, name: str = "A") -> np.ndarray:
    """Return ``a`` as a finite, nonempty, row-major float64 matrix."""
    arr = np.ascontiguousarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name} must be nonempty, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf")
    return arr


def as_vector(x, name: str = "x") -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError(f"{name} must be a nonempty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf")
    return arr


def basis_vector(n: int, i: int) -> np.ndarray:
    """The standard basis vector e_i of length n (0-based index)."""
    e = np.zeros(n)
    e[i] = 1.0
    return e


def matvec(A, x) -> np.ndarray:
    """Ax, rejecting mismatched dimensions."""
    A = as_matrix(A)
    x = as_vector(x)
    if A.shape[1] != x.size:
        raise InputError(f"dimension mismatch: A is {A.shape}, x has length {x.size}")
    return A @ x


def gram(A) -> np.ndarray:
    """B = AᵀA, symmetrized so that B equals Bᵀ exactly."""
    A = as_matrix(A)
    B = A.T @ A
    return np.ascontiguousarray(0.5 * (B + B.T))


def frobenius_norm_sq(A) -> float:
    A = np.asarray(A, dtype=np.float64)
    return float(np.sum(A * A))


def is_symmetric(A, rtol: float = 0.0) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    if rtol == 0.0:
        return bool(np.array_equal(A, A.T))
    return bool(np.all(np.abs(A - A.T) <= rtol * np.max(np.abs(A))))


def is_positive_definite(A) -> bool:
    """Symmetric with a successful Cholesky factorization (predicate only)."""
    if not is_symmetric(A, rtol=1e-12):
        return False
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return True


def direct_inverse_oracle(A) -> np.ndarray:
    """Reference inverse by Gauss-Jordan elimination on [A | I].

    Partial pivoting; used only to score estimates, never by the estimators.
    Raises ``SingularMatrixError`` when a pivot falls below
    ``PIVOT_RTOL * max|A|``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise InputError(f"inverse oracle needs a square matrix, got {A.shape}")
    threshold = PIVOT_RTOL * np.max(np.abs(A))
    aug = np.hstack([A, np.eye(n)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[p, k]) <= threshold:
            raise SingularMatrixError(f"pivot {k} is {aug[p, k]:.3e}, below {threshold:.3e}")
        if p != k:
            aug[[k, p]] = aug[[p, k]]
        aug[k] /= aug[k, k]
        factors = aug[:, k].copy()
        factors[k] = 0.0
        aug -= np.outer(factors, aug[k])
    return np.ascontiguousarray(aug[:, n:])


def direct_pseudoinverse_oracle(A) -> np.ndarray:
    """Reference left pseudoinverse (AᵀA)⁻¹Aᵀ for full-column-rank A."""
    A = as_matrix(A)
    if A.shape[0] <= A.shape[1]:
        raise InputError(f"left pseudoinverse needs rows > cols, got {A.shape}")
    return direct_inverse_oracle(gram(A)) @ A.T
