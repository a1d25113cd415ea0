"""Command-line entry point.

Exit codes: 0 success, 1 bad input (flags, files, configs), 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness
from .engine import (
    Mode,
    estimate_inverse,
    estimate_inverse_scaled,
    estimate_pseudoinverse,
)
from .errors import InputError, NumericalError
from .harness import ExperimentSpec, Family
from .io import read_matrix, write_matrix
from .solvers import CGVariant, Method, SolverConfig
from .straggler import (
    SWEEP_FIELDS,
    StragglerModel,
    make_assignment,
    simulate,
    summarize_sweep,
    sweep_straggler_tolerance,
)

EXPERIMENT_FIELDS = (
    "family", "size", "solver", "epsilon", "trial",
    "err_l2", "err_F", "err_rF", "bound_F", "bound_rF", "iters_mean",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _add_solver_flags(p):
    p.add_argument("--solver", choices=[m.value for m in Method], default="sd")
    p.add_argument("--eps", type=_positive_float, default=SolverConfig.epsilon)
    p.add_argument("--max-iters", type=_positive_int, default=None)
    p.add_argument("--cg-variant", choices=[v.value for v in CGVariant], default="normal")


def _solver(args) -> SolverConfig:
    return SolverConfig(
        method=args.solver, epsilon=args.eps, max_iters=args.max_iters, cg_variant=args.cg_variant
    )


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="colinv", description="Column-by-column matrix inversion by iterative least squares.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    inv = sub.add_parser("invert", help="estimate the inverse of a square matrix")
    inv.add_argument("matrix")
    _add_solver_flags(inv)
    inv.add_argument("--scale", default=None, help="positive d, or 'auto' for 1/sigma_min")
    inv.add_argument("--seed", type=int, default=0)
    inv.add_argument("--out")

    pin = sub.add_parser("pinv", help="estimate the left pseudoinverse of a tall matrix")
    pin.add_argument("matrix")
    _add_solver_flags(pin)
    pin.add_argument("--seed", type=int, default=0)
    pin.add_argument("--out")

    exp = sub.add_parser("experiment", help="accuracy table over random trials")
    exp.add_argument("--spec", help="key=value config file")
    exp.add_argument("--table", type=int, choices=sorted(harness.TABLE_SPECS))
    exp.add_argument("--trials", type=_positive_int)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--out", help="per-trial CSV")

    sim = sub.add_parser("simulate", help="replicated master/worker run with stragglers")
    sim.add_argument("--workers", type=_positive_int, required=True)
    sim.add_argument("--replication", type=_positive_int, required=True)
    sim.add_argument("--straggler-model", default="none", help="none | fixed:0,1 | bernoulli:p | shiftexp:base,rate")
    src = sim.add_mutually_exclusive_group()
    src.add_argument("--matrix", help="matrix file (default: a seeded Gaussian matrix)")
    src.add_argument("--n", type=_positive_int, default=10, help="size of the generated matrix")
    sim.add_argument("--mode", choices=[m.value for m in Mode], default="inverse")
    _add_solver_flags(sim)
    sim.add_argument("--unit-cost", type=float, default=1.0)
    sim.add_argument("--sweep-r", type=_int_list, help="comma-separated r values to sweep")
    sim.add_argument("--runs", type=_positive_int, default=1, help="straggler seeds per r in a sweep")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", help="recovered matrix file")
    sim.add_argument("--report", help="CSV of r, seed, recovery, completion_time, total_load")

    chk = sub.add_parser("check-bounds", help="measured errors against the steepest-descent bounds")
    chk.add_argument("--family", choices=["spd", "rect"], default="spd")
    chk.add_argument("--eps", type=_float_list, required=True, help="one or more tolerances, comma-separated")
    chk.add_argument("--trials", type=_positive_int, default=20)
    chk.add_argument("--n", type=_positive_int, default=20, help="matrix size (rect: m, giving 2m x m)")
    chk.add_argument("--max-iters", type=_positive_int, default=harness.BOUND_CHECK_MAX_ITERS)
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--out")
    return p


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path, fields, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row[k]) for k in fields])
    try:
        Path(path).write_text(buf.getvalue())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _write_matrix(path, X):
    try:
        write_matrix(path, X)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _show_estimate(est, out):
    it = est.iterations
    rows, cols = est.matrix.shape
    done = sum(1 for o in est.per_column if o is not None and o.converged)
    print(f"{est.kind} estimate: {rows}x{cols}", file=out)
    print(f"solves converged: {done}/{len(est.per_column)}", file=out)
    print(f"iterations min/mean/max: {it.min()}/{it.mean():.1f}/{it.max()}", file=out)
    if est.scale_d != 1.0:
        print(f"scale d: {est.scale_d:.6g}", file=out)
    if max(rows, cols) <= 8:
        print(np.array2string(est.matrix, precision=6, suppress_small=True), file=out)


def cmd_invert(args, out):
    A = read_matrix(args.matrix)
    cfg = _solver(args)
    if args.scale is None:
        est = estimate_inverse(A, cfg)
    elif args.scale == "auto":
        est = estimate_inverse_scaled(A, "auto", cfg)
    else:
        try:
            d = float(args.scale)
        except ValueError:
            raise InputError(f"--scale: expected a number or 'auto', got {args.scale!r}") from None
        est = estimate_inverse_scaled(A, d, cfg)
    _show_estimate(est, out)
    if args.out:
        _write_matrix(args.out, est.matrix)
    return 0


def cmd_pinv(args, out):
    est = estimate_pseudoinverse(read_matrix(args.matrix), _solver(args))
    _show_estimate(est, out)
    if args.out:
        _write_matrix(args.out, est.matrix)
    return 0


def _experiment_spec(args) -> tuple:
    if args.spec is None and args.table is None:
        raise InputError("experiment: give --table, --spec, or both")
    base = harness.TABLE_SPECS[args.table] if args.table else ExperimentSpec()
    spec = harness.load_config(args.spec, base) if args.spec else base
    if args.trials is not None:
        spec = replace(spec, trials=args.trials)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    return spec, args.table


def cmd_experiment(args, out):
    spec, table = _experiment_spec(args)
    result = harness.run_table_experiment(spec)
    summary = result.summary()
    print(f"family={spec.family.value} size={spec.size} solver={spec.solver.method.value} "
          f"mode={spec.mode.value} trials={spec.trials} seed={spec.seed}", file=out)
    ref = harness.compare_to_reference(table, summary) if table else None
    header = f"{'epsilon':>10} {'err_l2':>12} {'err_F':>12} {'err_rF':>12} {'orders (l2,F,rF)':>18} {'iters':>12}"
    if ref:
        header += f" {'reference':>14} {'within 1':>9}"
    print(header, file=out)
    for i, e in enumerate(summary):
        orders = ",".join(str(e["order_" + k]) for k in ("err_l2", "err_F", "err_rF"))
        line = (f"{e['epsilon']:>10.0e} {e['err_l2']:>12.3e} {e['err_F']:>12.3e} {e['err_rF']:>12.3e} "
                f"{orders:>18} {e['iters_mean']:>12.1f}")
        if ref:
            cells = ref[3 * i: 3 * i + 3]
            line += f" {','.join(str(c['reference']) for c in cells):>14} {str(all(c['ok'] for c in cells)):>9}"
        print(line, file=out)
    if not all(e["converged"] for e in summary):
        print("warning: some solves stopped at the iteration cap", file=out)
    if args.out:
        _write_csv(args.out, EXPERIMENT_FIELDS, result.rows)
    return 0


def _sim_matrix(args):
    if args.matrix:
        return read_matrix(args.matrix)
    if args.mode == Mode.PSEUDOINVERSE.value:
        spec = ExperimentSpec(Family.GAUSSIAN_RECT, 2 * args.n, args.n, seed=args.seed, mode=Mode.PSEUDOINVERSE)
    else:
        spec = ExperimentSpec(Family.GAUSSIAN_SCALED, args.n, args.n, seed=args.seed)
    return harness.gen_matrix(spec, 0)


def cmd_simulate(args, out):
    A = _sim_matrix(args)
    cfg = _solver(args)
    sm = StragglerModel.parse(args.straggler_model, args.seed)
    count = A.shape[1]
    if args.replication > args.workers:
        raise InputError(f"--replication {args.replication} exceeds --workers {args.workers}")
    asg = make_assignment(count, args.workers, args.replication, args.seed)
    rep = simulate(A, cfg, asg, sm, args.mode, args.unit_cost)
    print(f"matrix: {A.shape[0]}x{A.shape[1]} mode={args.mode} workers={args.workers} r={args.replication} "
          f"stragglers={args.straggler_model}", file=out)
    print(f"decode_ok: {rep.decode_ok}", file=out)
    print(f"completion_time: {rep.completion_time:.6g}", file=out)
    print(f"stragglers_observed: {sorted(rep.stragglers_observed)}", file=out)
    print(f"total_load: {rep.total_load} scalars", file=out)
    print(f"{'worker':>6} {'columns':>8} {'scalars':>8} {'sends':>6} {'finish':>12}", file=out)
    for w, ((c, s), k) in enumerate(zip(rep.per_worker_load, rep.sends_per_worker)):
        print(f"{w:>6} {c:>8} {s:>8} {k:>6} {rep.worker_times[w]:>12.6g}", file=out)
    if rep.missing_columns:
        print(f"missing: {list(rep.missing_columns)}", file=out)
    rows = [{"r": args.replication, "seed": args.seed, "recovery": 1.0 if rep.decode_ok else 0.0,
             "completion_time": rep.completion_time, "total_load": rep.total_load}]
    if args.sweep_r:
        rows = sweep_straggler_tolerance(A, cfg, args.workers, args.sweep_r, sm,
                                         seeds=range(args.seed, args.seed + args.runs),
                                         mode=args.mode, unit_cost=args.unit_cost)
        print(f"{'r':>3} {'runs':>5} {'recovery':>9} {'mean time':>12} {'load':>8}", file=out)
        for s in summarize_sweep(rows):
            print(f"{s['r']:>3} {s['runs']:>5} {s['recovery_rate']:>9.3f} "
                  f"{s['mean_completion_time']:>12.6g} {s['total_load']:>8}", file=out)
    if args.out:
        _write_matrix(args.out, rep.recovered.matrix)
    if args.report:
        _write_csv(args.report, SWEEP_FIELDS, rows)
    return 0


def cmd_check_bounds(args, out):
    if not args.eps or any(not e > 0 for e in args.eps):
        raise InputError(f"--eps: need positive tolerances, got {args.eps}")
    eps = sorted(set(args.eps), reverse=True)
    rows = harness.bound_check_rows(args.family, eps, args.trials, args.n, args.seed, args.max_iters)
    print(f"{'trial':>5} {'epsilon':>8} {'err_F':>11} {'bound_F':>11} {'err_rF':>11} {'bound_rF':>11} {'ok':>5}", file=out)
    for r in rows:
        print(f"{r['trial']:>5} {r['epsilon']:>8.0e} {r['err_F']:>11.3e} {r['bound_F']:>11.3e} "
              f"{r['err_rF']:>11.3e} {r['bound_rF']:>11.3e} {str(r['ok']):>5}", file=out)
    judged = [r for r in rows if r["converged"] and r["hypothesis"]]
    bad = [r for r in judged if not r["ok"]]
    print(f"violations: {len(bad)} of {len(judged)} tolerance-met runs "
          f"({len(rows) - len(judged)} runs not judged)", file=out)
    if args.out:
        _write_csv(args.out, harness.BOUND_FIELDS, rows)
    return 2 if bad else 0


COMMANDS = {
    "invert": cmd_invert,
    "pinv": cmd_pinv,
    "experiment": cmd_experiment,
    "simulate": cmd_simulate,
    "check-bounds": cmd_check_bounds,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
