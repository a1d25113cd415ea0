"""Inverse and left-pseudoinverse estimates built one least-squares solve at a time.

Column ``i`` of the inverse estimate minimizes ``||A b - e_i||^2``; row ``i`` of
the pseudoinverse estimate is ``c_i Aᵀ`` where ``c_i`` minimizes
``||c B - e_iᵀ||^2`` with ``B = AᵀA``. Columns (rows) are independent, so any
subset can be solved on its own and merged later with bit-identical results.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError, NumericalError, SingularMatrixError
from .linalg import as_matrix, gram
from .solvers import CGVariant, Method, SolverConfig, Termination, _rows_times, solve_many
from .spectral import spectral_summary

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    INVERSE = "inverse"
    PSEUDOINVERSE = "pinv"


@dataclass
class InverseEstimate:
    """An inverse (n×n) or left-pseudoinverse (m×n) estimate.

    ``per_column[i]`` is the solve record behind column ``i`` of an inverse
    estimate, or behind row ``i`` of a pseudoinverse estimate (the record of
    ``c_i``); ``None`` marks a vector that was never computed. ``scale_d`` is 1 unless the estimate came from a scaled run.
    """

    matrix: np.ndarray
    per_column: list
    scale_d: float = 1.0
    kind: str = "inverse"
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        count = self.matrix.shape[1] if self.kind == "inverse" else self.matrix.shape[0]
        if count != len(self.per_column):
            raise ValueError(f"{count} estimated vectors but {len(self.per_column)} solve records")

    @property
    def iterations(self) -> np.ndarray:
        return np.array([-1 if o is None else o.iterations for o in self.per_column])

    @property
    def all_converged(self) -> bool:
        return all(o is not None and o.termination is Termination.TOLERANCE_MET for o in self.per_column)


def _square(A):
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"inverse estimation needs a square matrix, got {A.shape}")
    return A


def _columns(n, columns):
    if columns is None:
        return np.arange(n)
    idx = np.asarray(columns, dtype=np.int64).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InputError(f"column indices must lie in [0, {n}), got {idx.tolist()}")
    if np.unique(idx).size != idx.size:
        raise InputError("column indices must be distinct")
    return idx


def _solve(M, targets, cfg, epsilons, labels):
    try:
        return solve_many(M, targets, cfg, epsilons=epsilons)
    except NumericalError as exc:
        if getattr(exc, "column", None) is not None:
            exc.column = int(labels[exc.column])
        raise


def solve_columns(A, cfg: SolverConfig, columns=None, epsilons=None):
    """Solve ``min_b ||A b - e_i||^2`` for the given column indices.

    Returns ``outcomes[level][j]`` for ``columns[j]``, one level per entry of
    ``epsilons`` (or a single level for ``cfg.epsilon``).
    """
    A = _square(A)
    idx = _columns(A.shape[0], columns)
    targets = np.zeros((A.shape[0], idx.size))
    targets[idx, np.arange(idx.size)] = 1.0
    return _solve(A, targets, cfg, epsilons, idx)


def solve_pinv_rows(A, cfg: SolverConfig, rows=None, epsilons=None, B=None):
    """Row solves of the pseudoinverse estimate, with the ``c_i Aᵀ`` product.

    Returns ``(outcomes[level][j], rows_matrix[level])`` where each
    ``rows_matrix[level]`` holds the finished pseudoinverse rows.
    """
    A = _pinv_input(A)
    m = A.shape[1]
    B = gram(A) if B is None else B
    idx = _columns(m, rows)
    targets = np.zeros((m, idx.size))
    targets[idx, np.arange(idx.size)] = 1.0
    # B is symmetric, so the row problem ||c B - e_iᵀ|| is the column problem ||B cᵀ - e_i||
    if cfg.method is Method.CG and cfg.cg_variant is CGVariant.NORMAL:
        # B is SPD by construction, so CG can run on it directly
        cfg = replace(cfg, cg_variant=CGVariant.SPD)
    levels = _solve(B, targets, cfg, epsilons, idx)
    At = np.ascontiguousarray(A.T)
    products = []
    for outcomes in levels:
        if not outcomes:
            products.append(np.zeros((0, A.shape[0])))
            continue
        Cm = np.vstack([o.solution for o in outcomes])
        products.append(_rows_times(Cm, At))
    return levels, products


def _pinv_input(A):
    A = as_matrix(A)
    n, m = A.shape
    if n <= m:
        raise InputError(f"left pseudoinverse needs rows > cols (n > m), got {A.shape}")
    return A


def _warn(outcomes, what):
    missed = [i for i, o in enumerate(outcomes) if o.termination is Termination.MAX_ITERS_REACHED]
    msgs = [f"{what} {i}: iteration cap reached ({outcomes[i].iterations} iterations)" for i in missed]
    if missed:
        log.warning("%d %s(s) stopped at the iteration cap: %s", len(missed), what, missed[:10])
    return msgs


def _assemble_inverse(outcomes, scale=1.0):
    X = np.column_stack([o.solution for o in outcomes])
    if scale != 1.0:
        X = scale * X
    return InverseEstimate(np.ascontiguousarray(X), list(outcomes), scale, "inverse", _warn(outcomes, "column"))


def estimate_inverse(A, cfg: SolverConfig) -> InverseEstimate:
    """Estimate A⁻¹ column by column (minimizes ||AB - I||_F^2 columnwise)."""
    return _assemble_inverse(solve_columns(A, cfg)[0])


def estimate_inverse_sweep(A, cfg: SolverConfig, epsilons) -> list:
    """One :class:`InverseEstimate` per tolerance, from a single solver run.

    Identical to calling :func:`estimate_inverse` once per tolerance.
    """
    return [_assemble_inverse(level) for level in solve_columns(A, cfg, epsilons=epsilons)]


def auto_scale(A) -> float:
    """d = 1/sigma_min(A)."""
    summary = spectral_summary(A)
    if summary.sigma_min == 0.0:
        raise SingularMatrixError("sigma_min(A) is zero to working precision; cannot auto-scale")
    return 1.0 / summary.sigma_min


def estimate_inverse_scaled(A, d, cfg: SolverConfig) -> InverseEstimate:
    """Estimate A⁻¹ as ``d * (dA)⁻¹``; ``d="auto"`` picks ``1/sigma_min(A)``.

    The solve records describe the runs on ``dA``.
    """
    A = _square(A)
    if isinstance(d, str):
        if d != "auto":
            raise InputError(f"scale must be a positive number or 'auto', got {d!r}")
        d = auto_scale(A)
    d = float(d)
    if not (d > 0 and np.isfinite(d)):
        raise InputError(f"scale d must be positive, got {d}")
    return _assemble_inverse(solve_columns(d * A, cfg)[0], d)


def _assemble_pinv(outcomes, rows_matrix):
    return InverseEstimate(np.ascontiguousarray(rows_matrix), list(outcomes), 1.0, "pseudoinverse", _warn(outcomes, "row"))


def estimate_pseudoinverse(A, cfg: SolverConfig) -> InverseEstimate:
    """Estimate the left pseudoinverse (AᵀA)⁻¹Aᵀ of a tall full-rank A."""
    levels, products = solve_pinv_rows(A, cfg)
    return _assemble_pinv(levels[0], products[0])


def estimate_pseudoinverse_sweep(A, cfg: SolverConfig, epsilons) -> list:
    levels, products = solve_pinv_rows(A, cfg, epsilons=epsilons)
    return [_assemble_pinv(o, p) for o, p in zip(levels, products)]


__all__ = [
    "InverseEstimate",
    "Mode",
    "auto_scale",
    "estimate_inverse",
    "estimate_inverse_scaled",
    "estimate_inverse_sweep",
    "estimate_pseudoinverse",
    "estimate_pseudoinverse_sweep",
    "solve_columns",
    "solve_pinv_rows",
]
