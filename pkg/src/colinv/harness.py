"""Random test matrices and the accuracy-table experiments.

Gaussian entries come from numpy's counter-based Philox generator keyed by
``(seed, trial)`` and turned into normals with the Box-Muller transform, so
every trial is independent and reproducible on its own:

    u1, u2 ~ U[0, 1)            (consecutive Philox doubles)
    z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
    z1 = sqrt(-2 ln(1 - u1)) sin(2 pi u2)

Normals fill the matrix in row-major order as z0, z1, z0, z1, ...
"""
from __future__ import annotations

import concurrent.futures
import enum
import logging
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .engine import Mode, estimate_inverse_sweep, estimate_pseudoinverse_sweep
from .errors import InputError, SingularMatrixError
from .linalg import direct_inverse_oracle, direct_pseudoinverse_oracle, gram
from .metrics import BOUND_SIGMA_TOL, check_corollary, check_prop1, column_residuals_sq, residual_bound
from .solvers import CGVariant, Method, SolverConfig
from .spectral import spectral_summary

log = logging.getLogger(__name__)

RESAMPLE_LIMIT = 16


class Family(str, enum.Enum):
    GAUSSIAN_SCALED = "gaussian"
    SYMMETRIC_GAUSSIAN = "symmetric"
    SPD_GAUSSIAN = "spd"
    GAUSSIAN_RECT = "rect"


@dataclass(frozen=True)
class ExperimentSpec:
    """A matrix family, a solver and a tolerance sweep.

    ``scale`` multiplies the Gaussian entries (gaussian, symmetric, rect);
    ``shift`` is the diagonal shift of the spd family.
    """

    family: Family = Family.GAUSSIAN_SCALED
    rows: int = 100
    cols: int = 100
    scale: float = 1.0
    shift: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    epsilons: tuple = (1e-1, 1e-2, 1e-3)
    trials: int = 20
    seed: int = 0
    mode: Mode = Mode.INVERSE

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.trials < 1:
            raise InputError(f"trials must be >= 1, got {self.trials}")
        if not self.epsilons or any(not e > 0 for e in self.epsilons):
            raise InputError(f"epsilons must be nonempty and positive, got {self.epsilons}")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise InputError(f"epsilons must be strictly decreasing, got {self.epsilons}")
        if self.rows < 1 or self.cols < 1:
            raise InputError(f"size must be positive, got {self.rows}x{self.cols}")
        if self.family is not Family.GAUSSIAN_RECT and self.rows != self.cols:
            raise InputError(f"family {self.family.value} is square, got {self.rows}x{self.cols}")
        if self.mode is Mode.PSEUDOINVERSE and self.rows <= self.cols:
            raise InputError(f"pseudoinverse mode needs rows > cols, got {self.rows}x{self.cols}")
        if self.seed < 0:
            raise InputError(f"seed must be nonnegative, got {self.seed}")

    @property
    def size(self) -> str:
        return f"{self.rows}x{self.cols}"


def standard_normals(seed: int, trial: int, count: int, attempt: int = 0) -> np.ndarray:
    """``count`` N(0,1) draws for one (seed, trial) stream via Box-Muller."""
    bitgen = np.random.Philox(key=[seed % 2**64, trial % 2**64], counter=[0, 0, 0, attempt])
    pairs = (count + 1) // 2
    u = np.random.Generator(bitgen).random(2 * pairs)
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(2.0 * np.pi * u2)
    z[1::2] = radius * np.sin(2.0 * np.pi * u2)
    return z[:count]


def gen_matrix(spec: ExperimentSpec, trial: int, attempt: int = 0) -> np.ndarray:
    """The trial-th matrix of a spec; ``attempt`` draws a fresh replacement."""
    n, m = spec.rows, spec.cols
    Z = standard_normals(spec.seed, trial, n * m, attempt).reshape(n, m)
    if spec.family is Family.GAUSSIAN_SCALED or spec.family is Family.GAUSSIAN_RECT:
        return spec.scale * Z
    if spec.family is Family.SYMMETRIC_GAUSSIAN:
        M = spec.scale * Z
        return M + M.T
    return gram(Z) + spec.shift * np.eye(n)


def order_of_magnitude(x: float):
    """floor(log10 x), or None for a zero / non-finite value."""
    if not (x > 0 and math.isfinite(x)):
        return None
    return math.floor(math.log10(x))


def _oracle(spec, A):
    if spec.mode is Mode.INVERSE:
        return direct_inverse_oracle(A)
    return direct_pseudoinverse_oracle(A)


def run_trial(spec: ExperimentSpec, trial: int) -> list:
    """Per-epsilon result rows for one trial."""
    for attempt in range(RESAMPLE_LIMIT):
        A = gen_matrix(spec, trial, attempt)
        try:
            reference = _oracle(spec, A)
            break
        except SingularMatrixError as exc:
            log.warning("trial %d attempt %d: oracle failed (%s); resampling", trial, attempt, exc)
    else:
        raise SingularMatrixError(f"trial {trial}: {RESAMPLE_LIMIT} singular draws in a row")
    summary = spectral_summary(A)
    if spec.mode is Mode.INVERSE:
        estimates = estimate_inverse_sweep(A, spec.solver, spec.epsilons)
        check = check_prop1
    else:
        estimates = estimate_pseudoinverse_sweep(A, spec.solver, spec.epsilons)
        check = check_corollary
    out = []
    for eps, est in zip(spec.epsilons, estimates):
        report = check(A, est.matrix, eps, reference, summary)
        out.append(
            {
                "family": spec.family.value,
                "size": spec.size,
                "solver": spec.solver.method.value,
                "epsilon": eps,
                "trial": trial,
                "err_l2": report.err_l2,
                "err_F": report.err_F,
                "err_rF": report.err_rF,
                "bound_F": report.bound_F,
                "bound_rF": report.bound_rF,
                "iters_mean": float(np.mean(est.iterations)),
                "attempt": attempt,
                "converged": est.all_converged,
                "hypothesis": report.hypothesis_holds,
                "bound_ok_F": report.bound_satisfied[0],
                "bound_ok_rF": report.bound_satisfied[1],
                "sigma_min": summary.sigma_min,
                "kappa2": summary.kappa2,
            }
        )
    return out


def thread_count() -> int:
    """Worker processes for trials: ``COLINV_THREADS`` (0 or unset = all CPUs)."""
    raw = os.environ.get("COLINV_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"COLINV_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise InputError(f"COLINV_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list

    def summary(self) -> list:
        """Mean (with its order of magnitude) and median of each error over trials, per epsilon."""
        out = []
        for eps in self.spec.epsilons:
            # rows are already sorted by trial, so the means are order-independent
            sel = [r for r in self.rows if r["epsilon"] == eps]
            entry = {"epsilon": eps, "trials": len(sel)}
            for key in ("err_l2", "err_F", "err_rF", "iters_mean"):
                mean = math.fsum(r[key] for r in sel) / len(sel)
                entry[key] = mean
                if key != "iters_mean":
                    entry["order_" + key] = order_of_magnitude(mean)
                    # the mean of a heavy-tailed error is one trial; the median shows the typical one
                    entry["median_" + key] = float(np.median([r[key] for r in sel]))
            entry["converged"] = all(r["converged"] for r in sel)
            out.append(entry)
        return out


def run_table_experiment(spec: ExperimentSpec, mode: Mode | None = None, workers: int | None = None) -> ExperimentResult:
    """Run every trial of ``spec`` and collect per-trial, per-epsilon rows."""
    if mode is not None:
        spec = replace(spec, mode=Mode(mode))
    workers = thread_count() if workers is None else workers
    trials = range(spec.trials)
    if workers > 1 and spec.trials > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(workers, spec.trials)) as pool:
            chunks = list(pool.map(run_trial, [spec] * spec.trials, trials))
    else:
        chunks = [run_trial(spec, t) for t in trials]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r["trial"], -r["epsilon"]))
    return ExperimentResult(spec, rows)


# Orders of magnitude of the published mean errors, per table and tolerance.
REFERENCE_ORDERS = {
    1: {"err_l2": [-2, -5, -7, -9, -12], "err_F": [-2, -5, -7, -9, -12], "err_rF": [-2, -5, -7, -9, -12]},
    2: {"err_l2": [-3, -5, -8, -11, -12], "err_F": [-3, -5, -8, -11, -12], "err_rF": [-3, -5, -7, -10, -12]},
    3: {"err_l2": [-4, -6, -8, -10, -12], "err_F": [-5, -7, -9, -11, -13], "err_rF": [-5, -7, -9, -11, -13]},
    4: {"err_l2": [-4, -6, -8, -10, -12], "err_F": [-2, -3, -8, -10, -12], "err_rF": [-2, -3, -8, -10, -12]},
}

_SD_LARGE = SolverConfig(method=Method.SD, max_iters=50_000_000)
_CG_LARGE = SolverConfig(method=Method.CG, max_iters=100_000)

TABLE_SPECS = {
    1: ExperimentSpec(
        Family.GAUSSIAN_SCALED, 100, 100, scale=50.0, solver=_SD_LARGE,
        epsilons=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5), trials=20, mode=Mode.INVERSE,
    ),
    2: ExperimentSpec(
        Family.SYMMETRIC_GAUSSIAN, 100, 100, scale=25.0,
        solver=replace(_CG_LARGE, cg_variant=CGVariant.SYMMETRIC),
        epsilons=(1e-3, 1e-4, 1e-5, 1e-6, 1e-7), trials=20, mode=Mode.INVERSE,
    ),
    3: ExperimentSpec(
        Family.GAUSSIAN_RECT, 100, 50, scale=1.0, solver=_SD_LARGE,
        epsilons=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5), trials=20, mode=Mode.PSEUDOINVERSE,
    ),
    4: ExperimentSpec(
        Family.GAUSSIAN_RECT, 100, 50, scale=1.0, solver=replace(_CG_LARGE, cg_variant=CGVariant.SPD),
        epsilons=(1e-3, 1e-4, 1e-5, 1e-6, 1e-7), trials=20, mode=Mode.PSEUDOINVERSE,
    ),
}


def compare_to_reference(table: int, summary: list, slack: int = 1) -> list:
    """Per (metric, epsilon): measured order vs reference order, within ``slack``."""
    ref = REFERENCE_ORDERS[table]
    out = []
    for i, entry in enumerate(summary):
        for key in ("err_l2", "err_F", "err_rF"):
            got = entry["order_" + key]
            want = ref[key][i]
            ok = got is not None and abs(got - want) <= slack
            out.append({"epsilon": entry["epsilon"], "metric": key, "order": got, "reference": want, "ok": ok})
    return out


BOUND_FIELDS = (
    "family", "size", "trial", "epsilon", "converged", "hypothesis",
    "err_F", "bound_F", "err_rF", "bound_rF", "max_residual", "residual_bound", "ok",
)


# Bound checks judge only tolerance-met runs, so they get a generous cap.
BOUND_CHECK_MAX_ITERS = 1_000_000


def bound_check_rows(family: str, epsilons, trials: int, n: int, seed: int = 0,
                     max_iters: int = BOUND_CHECK_MAX_ITERS) -> list:
    """SD errors next to their guarantees, one row per (trial, epsilon).

    ``spd``: n×n matrices ZᵀZ + I, checked against the inverse bounds and the
    per-column residual bound. ``rect``: 2n×n Gaussian matrices, checked
    against the pseudoinverse Frobenius bound. ``ok`` only means something for
    rows with ``converged`` and ``hypothesis`` both true.
    """
    solver = SolverConfig(method=Method.SD, max_iters=max_iters)
    if family == "spd":
        spec = ExperimentSpec(Family.SPD_GAUSSIAN, n, n, shift=1.0, solver=solver,
                              epsilons=tuple(epsilons), trials=trials, seed=seed)
    elif family == "rect":
        spec = ExperimentSpec(Family.GAUSSIAN_RECT, 2 * n, n, solver=solver, epsilons=tuple(epsilons),
                              trials=trials, seed=seed, mode=Mode.PSEUDOINVERSE)
    else:
        raise InputError(f"family must be 'spd' or 'rect', got {family!r}")
    rows = []
    for trial in range(trials):
        A = gen_matrix(spec, trial)
        s = spectral_summary(A, tol=BOUND_SIGMA_TOL)
        reference = _oracle(spec, A)
        if spec.mode is Mode.INVERSE:
            estimates = estimate_inverse_sweep(A, solver, spec.epsilons)
        else:
            estimates = estimate_pseudoinverse_sweep(A, solver, spec.epsilons)
        for eps, est in zip(spec.epsilons, estimates):
            if spec.mode is Mode.INVERSE:
                rep = check_prop1(A, est.matrix, eps, reference, s)
                max_res = float(np.max(column_residuals_sq(A, est.matrix)))
                res_bound = residual_bound(s.sigma_min, eps)
                ok = rep.bound_satisfied[0] and rep.bound_satisfied[1] and max_res <= res_bound
            else:
                rep = check_corollary(A, est.matrix, eps, reference, s)
                max_res = res_bound = math.nan
                ok = rep.bound_satisfied[0]
            rows.append({
                "family": family, "size": spec.size, "trial": trial, "epsilon": eps,
                "converged": est.all_converged, "hypothesis": rep.hypothesis_holds,
                "err_F": rep.err_F, "bound_F": rep.bound_F, "err_rF": rep.err_rF, "bound_rF": rep.bound_rF,
                "max_residual": max_res, "residual_bound": res_bound, "ok": bool(ok),
            })
    return rows


# -- key=value experiment config files ---------------------------------------

_SOLVER_KEYS = {
    "solver": ("method", str),
    "max_iters": ("max_iters", int),
    "ls_alpha": ("ls_alpha", float),
    "ls_beta": ("ls_beta", float),
    "t_init": ("t_init", float),
    "cg_variant": ("cg_variant", str),
}
_SPEC_KEYS = {
    "family": str,
    "rows": int,
    "cols": int,
    "scale": float,
    "shift": float,
    "trials": int,
    "seed": int,
    "mode": str,
    "epsilons": lambda v: tuple(float(x) for x in v.split(",") if x.strip()),
}


def parse_config(text: str, base: ExperimentSpec | None = None, source: str = "<config>") -> ExperimentSpec:
    """Flat ``key = value`` lines; ``#`` starts a comment.

    Unset keys keep their value from ``base`` (default: a fresh spec).
    """
    base = base or ExperimentSpec()
    spec_kw, solver_kw = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _SOLVER_KEYS:
                name, conv = _SOLVER_KEYS[key]
                solver_kw[name] = conv(value)
            elif key == "epsilon":
                solver_kw["epsilon"] = float(value)
            elif key in _SPEC_KEYS:
                spec_kw[key] = _SPEC_KEYS[key](value)
            else:
                raise InputError(f"{source}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"{source}:{lineno}: bad value for {key!r}: {value!r}") from None
    try:
        solver = replace(base.solver, **solver_kw)
        return replace(base, solver=solver, **spec_kw)
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise InputError(f"{source}: {exc}") from None
        raise InputError(f"{source}: {exc}") from None


def load_config(path, base: ExperimentSpec | None = None) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return parse_config(text, base, str(path))
