"""Distributing column blocks over workers with replication, and losing some of them.

Run: python demos/05_stragglers.py
"""
import numpy as np

from colinv import SolverConfig, StragglerModel, estimate_inverse, make_assignment, simulate, sweep_straggler_tolerance
from colinv.straggler import summarize_sweep

rng = np.random.default_rng(5)
A = rng.standard_normal((16, 16)) + 6 * np.eye(16)
cfg = SolverConfig(epsilon=1e-8)

# 4 workers, every block held by 2 of them
asg = make_assignment(16, num_workers=4, r=2)
for w in range(asg.num_workers):
    print(f"worker {w} holds blocks {asg.blocks_of(w)}")

# any single straggler is tolerated, and the result matches the sequential estimate
rep = simulate(A, cfg, asg, StragglerModel("fixed", (2,)))
seq = estimate_inverse(A, cfg).matrix
print("worker 2 silent: decoded", rep.decode_ok, " identical to sequential", np.array_equal(rep.recovered.matrix, seq))
print("  sends per worker", rep.sends_per_worker, " completion time", rep.completion_time)

# two adjacent stragglers take out both holders of a block
rep = simulate(A, cfg, asg, StragglerModel("fixed", (1, 2)))
print("workers 1,2 silent: decoded", rep.decode_ok, " missing columns", rep.missing_columns)

# random delays: shifted exponential finishing times, nobody lost
rep = simulate(A, cfg, asg, StragglerModel.parse("shiftexp:1,0.5", seed=3), unit_cost=1e-3)
print("shifted-exponential delays: worker times", np.round(rep.worker_times, 3), " done at", round(rep.completion_time, 3))

# replication factor against the chance of losing a block under Bernoulli failures
rows = sweep_straggler_tolerance(A, cfg, 6, (1, 2, 3), StragglerModel.parse("bernoulli:0.3"), seeds=range(20))
for row in summarize_sweep(rows):
    print(row)
