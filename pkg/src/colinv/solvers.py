"""Least-squares solvers: steepest descent with backtracking, and CG.

Both solve ``min_b ||M b - y||_2^2``. The public single-vector functions
(:func:`sd_least_squares`, :func:`cg_least_squares`) are thin wrappers over
:func:`solve_many`, which advances a whole batch of right-hand sides in
lock-step. Every right-hand side keeps its own step sizes, iteration count and
termination, so a column's trajectory does not depend on which other columns
share the batch.

Batches are stored one problem per row ("row layout"); with a symmetric
system matrix ``H`` the products ``H g`` for all rows are a single ``G @ H``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import BreakdownError, DivergenceError, InputError
from ._kernels import armijo_steps, sd_update
from .linalg import as_matrix, as_vector, is_symmetric


class Method(str, enum.Enum):
    SD = "sd"
    CG = "cg"


class Termination(str, enum.Enum):
    TOLERANCE_MET = "tolerance_met"
    MAX_ITERS_REACHED = "max_iters_reached"


class CGVariant(str, enum.Enum):
    """Which linear system CG iterates on.

    ``normal``: the normal equations AᵀA b = Aᵀy (any full-column-rank A).
    ``spd``: A b = y for a symmetric positive definite A; any non-positive
    curvature means the assumption was wrong and raises.
    ``symmetric``: A b = y for a symmetric, possibly indefinite A; only an
    exactly zero curvature raises.
    """

    NORMAL = "normal"
    SPD = "spd"
    SYMMETRIC = "symmetric"


class InitRule(str, enum.Enum):
    ZERO = "zero"
    GIVEN = "given"


@dataclass(frozen=True)
class SolverConfig:
    """Solver choice and its knobs.

    ``epsilon`` bounds ``||grad f||_2`` for SD and the iterate displacement
    ``||b_k - b_{k-1}||_2`` for CG. ``max_iters=None`` means ``50 * n`` for
    ``n`` unknowns. ``cg_variant`` picks the system CG iterates on (see
    :class:`CGVariant`); SD ignores it.
    """

    method: Method = Method.SD
    epsilon: float = 1e-6
    max_iters: int | None = None
    ls_alpha: float = 0.25
    ls_beta: float = 0.5
    t_init: float = 1.0
    init_rule: InitRule = InitRule.ZERO
    cg_variant: CGVariant = CGVariant.NORMAL
    # SD updates its gradient recursively; recompute it from the iterate this often.
    refresh_every: int = 64

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "init_rule", InitRule(self.init_rule))
        object.__setattr__(self, "cg_variant", CGVariant(self.cg_variant))
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise InputError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iters is not None and int(self.max_iters) < 1:
            raise InputError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 < self.ls_alpha < 0.5:
            raise InputError(f"ls_alpha must lie in (0, 0.5), got {self.ls_alpha}")
        if not 0 < self.ls_beta < 1:
            raise InputError(f"ls_beta must lie in (0, 1), got {self.ls_beta}")
        if not self.t_init > 0:
            raise InputError(f"t_init must be positive, got {self.t_init}")
        if int(self.refresh_every) < 1:
            raise InputError(f"refresh_every must be >= 1, got {self.refresh_every}")

    def iteration_cap(self, n_unknowns: int) -> int:
        return int(self.max_iters) if self.max_iters is not None else 50 * n_unknowns


@dataclass
class SolveOutcome:
    """One solve: the estimate, how long it took and why it stopped.

    ``history`` is filled only on request and holds ``objective`` (one value
    per iterate), ``step`` (SD step sizes or CG step lengths) and
    ``criterion`` (gradient norm for SD, displacement for CG).
    """

    solution: np.ndarray
    iterations: int
    final_criterion_value: float
    termination: Termination
    history: dict | None = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.termination is Termination.TOLERANCE_MET


def ls_objective(A, b, y) -> float:
    """f(b) = ||Ab - y||_2^2."""
    r = np.asarray(A) @ np.asarray(b) - np.asarray(y)
    return float(r @ r)


def ls_gradient(A, b, y) -> np.ndarray:
    """Gradient of :func:`ls_objective`: 2Aᵀ(Ab - y)."""
    A = np.asarray(A)
    return 2.0 * (A.T @ (A @ np.asarray(b) - np.asarray(y)))


def _rows_times(X: np.ndarray, H: np.ndarray) -> np.ndarray:
    # A single row goes through gemv, which rounds differently from gemm;
    # keep every batch size on the gemm path so rows stay batch-independent.
    if X.shape[0] == 1:
        return (np.vstack([X, X]) @ H)[:1]
    return X @ H


def _rowdot(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", X, Y)


def backtracking_steps(g2, q, alpha: float, beta: float, t_init: float) -> np.ndarray:
    """Backtracking line search for quadratic least squares, per row.

    Starting from ``t_init``, shrinks ``t`` by ``beta`` until the Armijo
    condition ``f(b - t g) <= f(b) - alpha t ||g||^2`` holds. For
    ``f(b) = ||Mb - y||^2`` we have ``f(b - t g) = f(b) - t ||g||^2 + t^2 q``
    with ``q = ||M g||^2``, so the test reduces to ``t q <= (1 - alpha) ||g||^2``
    and no extra objective evaluations are needed.
    """
    g2 = np.ascontiguousarray(g2, dtype=np.float64).ravel()
    q = np.ascontiguousarray(q, dtype=np.float64).ravel()
    if g2.shape != q.shape:
        raise InputError(f"g2 and q differ in shape: {g2.shape} vs {q.shape}")
    out = np.empty_like(g2)
    armijo_steps(g2, q, float(alpha), float(beta), float(t_init), out)
    return out


class _Recorder:
    """Collects per-epsilon outcomes for a batch of rows."""

    def __init__(self, k, epsilons, history):
        self.epsilons = epsilons
        self.eps_array = np.asarray(epsilons, dtype=np.float64)
        self.level = np.zeros(k, dtype=np.int64)
        self.results = [[None] * k for _ in epsilons]
        self.history = [dict(objective=[], step=[], criterion=[]) for _ in range(k)] if history else None

    def record(self, rows, X, crit, iters, termination=None):
        """Record rows that meet their current level (or all remaining levels)."""
        done = []
        for pos, row in enumerate(rows):
            value = float(crit[pos])
            while self.level[row] < len(self.epsilons):
                lvl = self.level[row]
                if termination is None and value > self.epsilons[lvl]:
                    break
                term = termination or Termination.TOLERANCE_MET
                self.results[lvl][row] = SolveOutcome(
                    solution=X[pos].copy(),
                    iterations=int(iters),
                    final_criterion_value=value,
                    termination=term,
                    history=self._history(row, iters),
                )
                self.level[row] += 1
            if self.level[row] >= len(self.epsilons):
                done.append(pos)
        return done

    def _history(self, row, iters):
        if self.history is None:
            return None
        h = self.history[row]
        return {
            "objective": np.array(h["objective"][: iters + 1]),
            "step": np.array(h["step"][:iters]),
            "criterion": np.array(h["criterion"][: iters + 1]),
        }


def _prepare(M, Y, cfg: SolverConfig):
    M = as_matrix(M, "A")
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2 or Y.shape[0] != M.shape[0]:
        raise InputError(f"dimension mismatch: A is {M.shape}, targets have shape {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise InputError("targets contain NaN or Inf")
    if cfg.method is Method.CG and cfg.cg_variant is not CGVariant.NORMAL:
        if not is_symmetric(M):
            raise InputError(f"cg_variant={cfg.cg_variant.value} needs an exactly symmetric matrix")
        H = M
        C = np.ascontiguousarray(Y.T)
    else:
        H = M.T @ M
        H = np.ascontiguousarray(0.5 * (H + H.T))
        C = _rows_times(np.ascontiguousarray(Y.T), M)
    return M, Y, H, C


def _initial(X0, k, n, cfg):
    if cfg.init_rule is InitRule.ZERO:
        if X0 is not None:
            raise InputError("an initial iterate was given but init_rule is 'zero'")
        return np.zeros((k, n))
    if X0 is None:
        raise InputError("init_rule is 'given' but no initial iterate was supplied")
    X0 = np.array(X0, dtype=np.float64, ndmin=2)
    if X0.shape == (n, k) and k != n:
        X0 = X0.T
    if X0.shape != (k, n) or not np.all(np.isfinite(X0)):
        raise InputError(f"initial iterate must have shape ({k}, {n}) and be finite")
    return np.ascontiguousarray(X0)


def _check_epsilons(epsilons, cfg):
    eps = [cfg.epsilon] if epsilons is None else [float(e) for e in epsilons]
    if not eps or any(not e > 0 for e in eps):
        raise InputError(f"epsilons must be positive, got {eps}")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise InputError(f"epsilons must be strictly decreasing, got {eps}")
    return eps


def solve_many(M, Y, cfg: SolverConfig, epsilons=None, X0=None, history=False):
    """Solve ``min_b ||M b - y_j||^2`` for every column ``y_j`` of ``Y``.

    With ``epsilons`` (strictly decreasing) the solver runs once to the
    smallest tolerance and captures, for each tolerance, the first iterate at
    which the stopping test holds. That is exactly the result a separate run
    with that tolerance would return, since no tolerance influences the
    trajectory. Returns ``outcomes[level][column]``.
    """
    eps = _check_epsilons(epsilons, cfg)
    # overflow is caught by the explicit finiteness checks
    with np.errstate(over="ignore", invalid="ignore"):
        M, Y, H, C = _prepare(M, Y, cfg)
        k, n = C.shape
        X = _initial(X0, k, n, cfg)
        rec = _Recorder(k, eps, history)
        if cfg.method is Method.SD:
            _run_sd(M, Y, H, C, X, cfg, rec)
        else:
            _run_cg(M, Y, H, C, X, cfg, rec)
    return rec.results


def _objectives(M, Y, X, rows):
    R = _rows_times(X, np.ascontiguousarray(M.T)) - Y.T[rows]
    return _rowdot(R, R)


def _run_sd(M, Y, H, C, X, cfg, rec):
    cap = cfg.iteration_cap(H.shape[0])
    rows = np.arange(X.shape[0])
    G = 2.0 * (_rows_times(X, H) - C)
    g2 = _rowdot(G, G)
    t = np.empty(rows.size)
    it = 0
    check = True
    if rec.history is not None:
        f = _objectives(M, Y, X, rows)
        for pos, row in enumerate(rows):
            rec.history[row]["objective"].append(float(f[pos]))
            rec.history[row]["criterion"].append(float(np.sqrt(g2[pos])))
    targets = rec.eps_array[rec.level[rows]]
    while True:
        # stopping test on the recursive gradient, confirmed on the exact one
        finished = []
        if check:
            cand = np.nonzero(np.sqrt(g2) <= targets)[0]
            if cand.size:
                exact = 2.0 * (_rows_times(X[cand], H) - C[rows[cand]])
                en = np.sqrt(_rowdot(exact, exact))
                finished += [cand[p] for p in rec.record(rows[cand], X[cand], en, it)]
                targets = rec.eps_array[np.minimum(rec.level[rows], len(rec.epsilons) - 1)]
        if it >= cap:
            left = np.setdiff1d(np.arange(rows.size), finished)
            if left.size:
                exact = 2.0 * (_rows_times(X[left], H) - C[rows[left]])
                en = np.sqrt(_rowdot(exact, exact))
                rec.record(rows[left], X[left], en, it, Termination.MAX_ITERS_REACHED)
            return
        if finished:
            keep = np.ones(rows.size, dtype=bool)
            keep[finished] = False
            rows, X, G, g2, t, targets = rows[keep], X[keep], G[keep], g2[keep], t[keep], targets[keep]
            if rows.size == 0:
                return
        HG = _rows_times(G, H)
        flags = sd_update(X, G, HG, g2, t, targets, cfg.ls_alpha, cfg.ls_beta, cfg.t_init)
        it += 1
        check = bool(flags & 1)
        if it % cfg.refresh_every == 0:
            G = 2.0 * (_rows_times(X, H) - C[rows])
            g2 = _rowdot(G, G)
            check = True
            if not np.all(np.isfinite(g2)):
                flags |= 2
        if flags & 2:
            bad = int(rows[np.nonzero(~np.isfinite(g2))[0][0]])
            raise DivergenceError(f"non-finite gradient at iteration {it}", iteration=it, column=bad)
        if rec.history is not None:
            f = _objectives(M, Y, X, rows)
            for pos, row in enumerate(rows):
                h = rec.history[row]
                h["objective"].append(float(f[pos]))
                h["step"].append(float(t[pos]))
                h["criterion"].append(float(np.sqrt(g2[pos])))


def _run_cg(M, Y, H, C, X, cfg, rec):
    cap = cfg.iteration_cap(H.shape[0])
    rows = np.arange(X.shape[0])
    R = C - _rows_times(X, H)
    P = R.copy()
    rs = _rowdot(R, R)
    it = 0
    if rec.history is not None:
        f = _objectives(M, Y, X, rows)
        for pos, row in enumerate(rows):
            rec.history[row]["objective"].append(float(f[pos]))
            rec.history[row]["criterion"].append(float("nan"))
    # an exactly zero residual means every later displacement is zero
    exact = np.nonzero(rs == 0.0)[0]
    finished = [exact[p] for p in rec.record(rows[exact], X[exact], np.zeros(exact.size), 0)] if exact.size else []
    disp = None
    while True:
        if disp is not None:
            crit = np.where(rs == 0.0, 0.0, disp)
            targets = rec.eps_array[rec.level[rows]]
            cand = np.nonzero(crit <= targets)[0]
            if cand.size:
                finished += [cand[p] for p in rec.record(rows[cand], X[cand], crit[cand], it)]
            if it >= cap:
                left = np.setdiff1d(np.arange(rows.size), finished)
                if left.size:
                    rec.record(rows[left], X[left], crit[left], it, Termination.MAX_ITERS_REACHED)
                return
        if finished:
            keep = np.ones(rows.size, dtype=bool)
            keep[finished] = False
            rows, X, R, P, rs = rows[keep], X[keep], R[keep], P[keep], rs[keep]
            finished = []
            if rows.size == 0:
                return
        HP = _rows_times(P, H)
        pHp = _rowdot(P, HP)
        broken = pHp == 0.0 if cfg.cg_variant is CGVariant.SYMMETRIC else pHp <= 0.0
        if np.any(broken):
            pos = int(np.nonzero(broken)[0][0])
            bad = int(rows[pos])
            raise BreakdownError(
                f"curvature pᵀHp = {pHp[pos]:.3e} at iteration {it + 1}",
                iteration=it + 1,
                column=bad,
            )
        a = rs / pHp
        step = a[:, None] * P
        X += step
        disp = np.sqrt(_rowdot(step, step))
        R -= a[:, None] * HP
        rs_new = _rowdot(R, R)
        P = R + (rs_new / rs)[:, None] * P
        rs = rs_new
        it += 1
        if not (np.all(np.isfinite(disp)) and np.all(np.isfinite(rs))):
            bad = int(rows[np.nonzero(~(np.isfinite(disp) & np.isfinite(rs)))[0][0]])
            raise DivergenceError(f"non-finite iterate at iteration {it}", iteration=it, column=bad)
        if rec.history is not None:
            f = _objectives(M, Y, X, rows)
            for pos, row in enumerate(rows):
                h = rec.history[row]
                h["objective"].append(float(f[pos]))
                h["step"].append(float(a[pos]))
                h["criterion"].append(float(disp[pos]))


def _single(A, y, cfg, x0, history, method):
    if cfg.method is not method:
        raise InputError(f"config selects {cfg.method.value}, this solver is {method.value}")
    A = as_matrix(A)
    y = as_vector(y, "y")
    if A.shape[0] != y.size:
        raise InputError(f"dimension mismatch: A is {A.shape}, y has length {y.size}")
    X0 = None if x0 is None else as_vector(x0, "x0")[None, :]
    return solve_many(A, y[:, None], cfg, X0=X0, history=history)[0][0]


def sd_least_squares(A, y, cfg: SolverConfig, x0=None, history=False) -> SolveOutcome:
    """Steepest descent on ``||Ab - y||^2`` with backtracking line search.

    Stops when ``||2Aᵀ(Ab - y)||_2 <= cfg.epsilon`` or after the iteration
    cap; in the latter case the last (lowest-objective) iterate is returned.
    """
    return _single(A, y, cfg, x0, history, Method.SD)


def cg_least_squares(A, y, cfg: SolverConfig, x0=None, history=False) -> SolveOutcome:
    """Conjugate gradients on the normal equations ``AᵀA b = Aᵀy``.

    With ``cfg.cg_variant`` set to ``spd`` or ``symmetric`` the caller vouches
    for the structure of A and plain CG runs on ``A b = y``. Stops once the
    iterate moves by at most ``cfg.epsilon``.
    """
    return _single(A, y, cfg, x0, history, Method.CG)


def least_squares(A, y, cfg: SolverConfig, x0=None, history=False) -> SolveOutcome:
    """Dispatch to the solver named by ``cfg.method``."""
    if cfg.method is Method.SD:
        return sd_least_squares(A, y, cfg, x0, history)
    return cg_least_squares(A, y, cfg, x0, history)
