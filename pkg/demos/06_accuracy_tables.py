"""Reduced versions of the accuracy tables: error orders against tolerance.

The full 100x100, 20-trial runs take from minutes (CG) to hours (SD); here the
size and trial count are cut down so the script finishes in a few minutes.
With three trials the mean already shows how one small-sigma_min draw dominates;
the median is the typical trial.

Run: python demos/06_accuracy_tables.py
"""
from dataclasses import replace

from colinv.harness import REFERENCE_ORDERS, TABLE_SPECS, run_table_experiment

for table in (1, 2, 3, 4):
    full = TABLE_SPECS[table]
    rows, cols = (30, 15) if full.rows != full.cols else (30, 30)
    spec = replace(full, rows=rows, cols=cols, trials=3)
    print(f"table {table}: {spec.family.value} {spec.size}, {spec.solver.method.value}, {spec.trials} trials")
    for entry, want in zip(run_table_experiment(spec).summary(), REFERENCE_ORDERS[table]["err_F"]):
        print(f"  eps={entry['epsilon']:.0e}  err_l2={entry['err_l2']:.2e}  err_F={entry['err_F']:.2e}"
              f"  median err_F={entry['median_err_F']:.2e}  (full-size reference order {want})")
