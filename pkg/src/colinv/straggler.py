"""Simulated master/worker execution with replicated column blocks.

The columns (pseudoinverse rows) are split into ``num_workers`` contiguous
blocks and block ``j`` is copied to workers ``j, j+1, ..., j+r-1`` (mod the
worker count). Each worker solves its blocks and sends them back once. The
master keeps the first copy of every block it receives and stops as soon as
all blocks are in.

Time is simulated, not measured: a worker finishes at
``unit_cost * (sum of its columns' iteration counts) + delay``, where the delay
comes from a :class:`StragglerModel`. An infinite delay means the worker
never answers.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .engine import InverseEstimate, Mode, solve_columns, solve_pinv_rows
from .errors import InputError
from .linalg import as_matrix, gram
from .solvers import SolverConfig


@dataclass(frozen=True)
class Assignment:
    num_workers: int
    groups: tuple  # block j -> column indices (int arrays)
    replicas: tuple  # block j -> worker ids holding it
    r: int

    def __post_init__(self):
        if len(self.groups) != len(self.replicas):
            raise InputError(f"{len(self.groups)} blocks but {len(self.replicas)} replica lists")
        cols = np.concatenate(self.groups) if self.groups else np.zeros(0, dtype=np.int64)
        if np.unique(cols).size != cols.size or (cols.size and (cols.min() != 0 or cols.max() != cols.size - 1)):
            raise InputError("blocks must partition 0..n-1")
        for j, ws in enumerate(self.replicas):
            if len(ws) != self.r or len(set(ws)) != len(ws):
                raise InputError(f"block {j} needs {self.r} distinct workers, got {list(ws)}")
            if any(not 0 <= w < self.num_workers for w in ws):
                raise InputError(f"block {j}: worker id out of range in {list(ws)}")

    @property
    def n_columns(self) -> int:
        return int(sum(g.size for g in self.groups))

    def blocks_of(self, worker: int) -> list:
        return [j for j, ws in enumerate(self.replicas) if worker in ws]


def make_assignment(n_columns: int, num_workers: int, r: int, seed: int = 0) -> Assignment:
    """Cyclic replication of ``num_workers`` near-equal contiguous blocks.

    ``seed`` is accepted for randomized schemes; the cyclic layout ignores it.
    """
    if n_columns < 1:
        raise InputError(f"n_columns must be >= 1, got {n_columns}")
    if num_workers < 1:
        raise InputError(f"num_workers must be >= 1, got {num_workers}")
    if not 1 <= r <= num_workers:
        raise InputError(f"replication r must lie in [1, {num_workers}], got {r}")
    groups = tuple(np.array_split(np.arange(n_columns), num_workers))
    replicas = tuple(tuple((j + i) % num_workers for i in range(r)) for j in range(num_workers))
    return Assignment(num_workers, groups, replicas, r)


class StragglerKind(str, enum.Enum):
    FIXED_SET = "fixed"
    BERNOULLI = "bernoulli"
    SHIFTED_EXPONENTIAL = "shiftexp"


@dataclass(frozen=True)
class StragglerModel:
    """Which workers are slow, and by how much.

    ``fixed``: ``params`` are worker ids that never answer.
    ``bernoulli``: ``params = (p,)``; each worker independently never answers
    with probability ``p``.
    ``shiftexp``: ``params = (base, rate)``; every worker answers after an
    extra ``base + Exp(rate)`` time units.
    """

    kind: StragglerKind = StragglerKind.FIXED_SET
    params: tuple = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", StragglerKind(self.kind))
        object.__setattr__(self, "params", tuple(self.params))
        if self.kind is StragglerKind.FIXED_SET:
            if any(int(w) != w or w < 0 for w in self.params):
                raise InputError(f"straggler ids must be nonnegative integers, got {list(self.params)}")
            object.__setattr__(self, "params", tuple(sorted({int(w) for w in self.params})))
        elif self.kind is StragglerKind.BERNOULLI:
            if len(self.params) != 1 or not 0.0 <= self.params[0] <= 1.0:
                raise InputError(f"bernoulli needs one probability in [0, 1], got {list(self.params)}")
        else:
            if len(self.params) != 2:
                raise InputError(f"shiftexp needs (base, rate), got {list(self.params)}")
            base, rate = self.params
            if not (base >= 0 and math.isfinite(base)) or not (rate > 0 and math.isfinite(rate)):
                raise InputError(f"shiftexp needs base >= 0 and rate > 0, got base={base}, rate={rate}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "StragglerModel":
        """``none``, ``fixed:0,3``, ``bernoulli:0.2`` or ``shiftexp:1.0,0.5``."""
        name, _, rest = text.strip().partition(":")
        if name == "none":
            if rest:
                raise InputError(f"'none' takes no parameters, got {text!r}")
            return cls(StragglerKind.FIXED_SET, (), seed)
        try:
            kind = StragglerKind(name)
        except ValueError:
            raise InputError(f"unknown straggler model {name!r} (none, fixed, bernoulli, shiftexp)") from None
        conv = int if kind is StragglerKind.FIXED_SET else float
        try:
            params = tuple(conv(v) for v in rest.split(",") if v.strip())
        except ValueError:
            raise InputError(f"bad parameters for {name}: {rest!r}") from None
        return cls(kind, params, seed)

    def delays(self, num_workers: int) -> np.ndarray:
        """Extra time per worker; ``inf`` for workers that never answer."""
        if self.kind is StragglerKind.FIXED_SET:
            if any(w >= num_workers for w in self.params):
                raise InputError(f"straggler ids {list(self.params)} exceed worker count {num_workers}")
            d = np.zeros(num_workers)
            d[list(self.params)] = np.inf
            return d
        rng = np.random.Generator(np.random.Philox(key=[self.seed, 0x5712]))
        if self.kind is StragglerKind.BERNOULLI:
            return np.where(rng.random(num_workers) < self.params[0], np.inf, 0.0)
        base, rate = self.params
        return base + rng.exponential(1.0 / rate, num_workers)


@dataclass
class SimReport:
    recovered: InverseEstimate
    completion_time: float
    per_worker_load: list  # (columns sent, scalars sent) per worker
    stragglers_observed: frozenset
    decode_ok: bool
    missing_columns: tuple = ()
    sends_per_worker: tuple = ()
    worker_times: np.ndarray = field(default=None, repr=False)

    @property
    def total_load(self) -> int:
        return sum(s for _, s in self.per_worker_load)


class BlockCache:
    """Block solves shared by every replica (and by repeated simulations).

    Replicas run the same deterministic solve, so one result per block serves
    all of them.
    """

    def __init__(self, A, cfg: SolverConfig, pinv: bool):
        self.A = as_matrix(A)
        self.cfg = cfg
        self.pinv = pinv
        self.B = gram(self.A) if pinv else None
        self._done = {}

    def get(self, cols: np.ndarray):
        key = tuple(int(c) for c in cols)
        if key not in self._done:
            if cols.size == 0:
                self._done[key] = ([], None)
            elif self.pinv:
                levels, products = solve_pinv_rows(self.A, self.cfg, rows=cols, B=self.B)
                self._done[key] = (levels[0], products[0])
            else:
                outcomes = solve_columns(self.A, self.cfg, columns=cols)[0]
                self._done[key] = (outcomes, np.column_stack([o.solution for o in outcomes]))
        return self._done[key]


def simulate(A, cfg: SolverConfig, asg: Assignment, sm: StragglerModel, mode="inverse",
             unit_cost: float = 1.0, cache: BlockCache | None = None) -> SimReport:
    """Run the replicated computation and decode from the earliest replies."""
    mode = Mode(mode)
    A = as_matrix(A)
    n, m = A.shape
    pinv = mode is Mode.PSEUDOINVERSE
    count = m if pinv else n
    if not pinv and n != m:
        raise InputError(f"inverse mode needs a square matrix, got {A.shape}")
    if pinv and n <= m:
        raise InputError(f"pseudoinverse mode needs rows > cols, got {A.shape}")
    if asg.n_columns != count:
        raise InputError(f"assignment covers {asg.n_columns} columns, the problem has {count}")
    if not unit_cost >= 0:
        raise InputError(f"unit_cost must be nonnegative, got {unit_cost}")
    if cache is None:
        cache = BlockCache(A, cfg, pinv)
    elif cache.pinv != pinv or cache.cfg != cfg or not np.array_equal(cache.A, A):
        raise InputError("block cache was built for a different problem")

    W = asg.num_workers
    col_len = n  # inverse columns and pseudoinverse rows both have n entries
    work = np.zeros(W)
    load = []
    sends = []
    for w in range(W):
        blocks = asg.blocks_of(w)
        iters = 0
        for j in blocks:
            outcomes, _ = cache.get(asg.groups[j])
            iters += sum(o.iterations for o in outcomes)
        work[w] = unit_cost * iters
        ncols = sum(asg.groups[j].size for j in blocks)
        load.append((ncols, ncols * col_len))
        sends.append(len(blocks))
    times = work + sm.delays(W)

    # discrete events: replies in time order, ties by worker id
    events = [(float(times[w]), w) for w in range(W) if math.isfinite(times[w])]
    heapq.heapify(events)
    owner = [None] * len(asg.groups)
    pending = sum(1 for g in asg.groups if g.size) or 0
    for j, g in enumerate(asg.groups):
        if g.size == 0:
            owner[j] = -1
    completion = 0.0
    while events and pending:
        t, w = heapq.heappop(events)
        completion = t
        for j in asg.blocks_of(w):
            if owner[j] is None:
                owner[j] = w
                pending -= 1
    decode_ok = pending == 0
    if decode_ok:
        responded = {w for w in range(W) if times[w] <= completion}
    else:
        responded = {w for w in range(W) if math.isfinite(times[w])}
    stragglers = frozenset(range(W)) - responded

    shape = (m, n) if pinv else (n, n)
    X = np.zeros(shape)
    per = [None] * count
    missing = []
    for j, g in enumerate(asg.groups):
        if g.size == 0:
            continue
        if owner[j] is None:
            missing.extend(int(c) for c in g)
            continue
        outcomes, block = cache.get(g)
        if pinv:
            X[g, :] = block
        else:
            X[:, g] = block
        for c, o in zip(g, outcomes):
            per[int(c)] = o
    what = "row" if pinv else "column"
    warnings = [f"{what} {c}: not recovered (every replica straggled)" for c in missing]
    warnings += [f"{what} {i}: iteration cap reached" for i, o in enumerate(per) if o is not None and not o.converged]
    recovered = InverseEstimate(X, per, 1.0, "pseudoinverse" if pinv else "inverse", warnings)
    return SimReport(recovered, completion, load, stragglers, decode_ok, tuple(missing), tuple(sends), times)


SWEEP_FIELDS = ("r", "seed", "recovery", "completion_time", "total_load")


def sweep_straggler_tolerance(A, cfg: SolverConfig, workers: int, r_values, sm: StragglerModel,
                              seeds=(0,), mode="inverse", unit_cost: float = 1.0) -> list:
    """One row per (r, seed): r, seed, recovery (1.0 or 0.0), completion_time, total_load.

    Block solves are shared across all runs. For undecodable runs
    ``completion_time`` is the time of the last reply received.
    """
    A = as_matrix(A)
    mode = Mode(mode)
    pinv = mode is Mode.PSEUDOINVERSE
    cache = BlockCache(A, cfg, pinv)
    count = A.shape[1]
    rows = []
    for r in r_values:
        asg = make_assignment(count, workers, int(r))
        for seed in seeds:
            rep = simulate(A, cfg, asg, replace(sm, seed=int(seed)), mode, unit_cost, cache)
            rows.append({
                "r": int(r),
                "seed": int(seed),
                "recovery": 1.0 if rep.decode_ok else 0.0,
                "completion_time": rep.completion_time,
                "total_load": rep.total_load,
            })
    return rows


def summarize_sweep(rows) -> list:
    """Per r: recovery rate, mean completion time over decoded runs, total load."""
    out = []
    for r in sorted({row["r"] for row in rows}):
        sel = [row for row in rows if row["r"] == r]
        ok = [row["completion_time"] for row in sel if row["recovery"] == 1.0]
        out.append({
            "r": r,
            "runs": len(sel),
            "recovery_rate": math.fsum(row["recovery"] for row in sel) / len(sel),
            "mean_completion_time": math.fsum(ok) / len(ok) if ok else math.nan,
            "total_load": sel[0]["total_load"],
        })
    return out
