"""Command-line front end.

Exit codes: 0 schedulable / success, 1 infeasible (or, for ``simulate``, a
deadline miss), 2 unknown, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional

from dagedf import formats
from dagedf.formats import InputError, format_rational, parse_rational
from dagedf.generators import dense_pattern, random_sporadic, synchronous_sequence
from dagedf.schedtests import (INFEASIBLE, SCHEDULABLE_UNIT_SPEED,
                               SCHEDULABLE_WITH_SPEEDUP, analyze)
from dagedf.simulator import edf_simulate, extract_witness, validate_normal
from dagedf.taskmodel import validate_task_system
from dagedf.workfunction import lambda_hat, system_work_profile

EXIT_OK, EXIT_INFEASIBLE, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    return str(x)


def _emit(text: str, path: Optional[str]):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _system(args):
    if not args.system:
        raise InputError("--system is required")
    tsys = formats.load_system(args.system)
    problems = validate_task_system(tsys)
    if problems:
        raise InputError("invalid task system:\n  " + "\n  ".join(problems))
    return tsys


def _processors(args) -> int:
    if args.processors is None or args.processors < 1:
        raise InputError("--processors must be a positive integer")
    return args.processors


def _epsilon(args) -> Fraction:
    eps = parse_rational(args.epsilon, "--epsilon")
    if eps <= 0:
        raise InputError("--epsilon must be positive")
    return eps


def _make_collection(args, tsys):
    pattern = args.pattern
    if pattern == "synchronous":
        return synchronous_sequence(tsys, _horizon(args))
    if pattern == "random":
        return random_sporadic(tsys, _horizon(args), args.seed)
    if pattern == "dense":
        if args.t is None or args.t < 1:
            raise InputError("--t must be a positive integer for the dense pattern")
        task = tsys.tasks[0] if args.task is None else _task(tsys, args.task)
        return dense_pattern(task, args.t)[0]
    raise InputError("--pattern is required (synchronous, dense or random)")


def _task(tsys, task_id):
    try:
        return tsys.task(task_id)
    except KeyError:
        raise InputError(f"--task: no task {task_id!r}") from None


def _horizon(args) -> int:
    if args.horizon is None or args.horizon < 1:
        raise InputError("--horizon must be a positive integer")
    return args.horizon


def cmd_validate(args) -> int:
    if args.collection:
        problems = validate_normal(formats.load_collection(args.collection))
    elif args.system:
        problems = validate_task_system(formats.load_system(args.system))
    else:
        raise InputError("validate needs --system or --collection")
    for p in problems:
        print(f"violation: {p}")
    print(f"violations: {len(problems)}")
    return EXIT_INPUT if problems else EXIT_OK


def report_dict(rep, m: int, eps) -> dict:
    def verdict(v):
        return {"kind": v.kind, "speedup": _fmt(v.speedup) if v.speedup is not None else None,
                "witness_t": v.witness_t, "detail": v.detail}
    return {
        "processors": m, "epsilon": _fmt(eps),
        "tasks": [{"id": k, "len": rep.lengths[k], "vol": rep.volumes[k],
                   "len_le_D": rep.feasible_chains[k]} for k in rep.lengths],
        "total_density": _fmt(rep.total_density),
        "lambda_hat": None if rep.lambda_hat is None else _fmt(rep.lambda_hat),
        "lambda_argmax": rep.lambda_argmax,
        "sufficient_test": verdict(rep.sufficient),
        "pseudopoly_test": verdict(rep.pseudopoly),
        "strongest": rep.strongest,
    }


def cmd_analyze(args) -> int:
    tsys = _system(args)
    m, eps = _processors(args), _epsilon(args)
    rep = analyze(tsys, m, eps)
    lines = [f"processors: {m}", f"epsilon: {_fmt(eps)}"]
    for k in rep.lengths:
        tsk = tsys.task(k)
        lines.append(f"task {k}: len={rep.lengths[k]} vol={rep.volumes[k]} "
                     f"D={tsk.deadline} T={tsk.period} len_le_D={rep.feasible_chains[k]}")
    lines.append(f"total_density: {_fmt(rep.total_density)}")
    lines.append(f"lambda_hat: {_fmt(rep.lambda_hat)} argmax={_fmt(rep.lambda_argmax)}")
    for name, v in (("sufficient_test", rep.sufficient), ("pseudopoly_test", rep.pseudopoly)):
        extra = ""
        if v.speedup is not None:
            extra += f" speedup={_fmt(v.speedup)}"
        if v.witness_t is not None:
            extra += f" witness_t={_fmt(v.witness_t)}"
        lines.append(f"{name}: {v.kind}{extra}  # {v.detail}")
    lines.append(f"verdict: {rep.strongest}")
    print("\n".join(lines))
    if args.out:
        _emit(json.dumps(report_dict(rep, m, eps), indent=2) + "\n", args.out)
    if rep.pseudopoly.kind == INFEASIBLE:
        return EXIT_INFEASIBLE
    if rep.strongest in (SCHEDULABLE_UNIT_SPEED, SCHEDULABLE_WITH_SPEEDUP):
        return EXIT_OK
    return EXIT_UNKNOWN


def cmd_simulate(args) -> int:
    m = _processors(args)
    speed = parse_rational(args.speed, "--speed")
    if speed <= 0:
        raise InputError("--speed must be positive")
    if args.collection:
        coll = formats.load_collection(args.collection)
    else:
        coll = _make_collection(args, _system(args))
    problems = validate_normal(coll)
    if problems:
        raise InputError("collection is not normal:\n  " + "\n  ".join(problems))
    trace = edf_simulate(coll, m, speed)
    _emit(formats.trace_csv(trace), args.out)
    print(f"jobs: {len(coll)}", file=sys.stderr)
    print(f"misses: {len(trace.misses)}", file=sys.stderr)
    if trace.misses:
        sys.stderr.write(formats.misses_csv(trace))
    if args.witness:
        w = extract_witness(coll, m, speed)
        text = (f"case: {w.case}\nt_star: {_fmt(w.t_star)}\ninterval_end: {_fmt(w.interval_end)}\n"
                f"work_in_interval: {_fmt(w.work_in_interval)}\nedf_work: {_fmt(w.edf_work)}\n"
                f"threshold: {_fmt(w.threshold)}\nmissed_job: {_fmt(w.missed_job)}\n")
        _emit(text, args.witness)
    return EXIT_INFEASIBLE if trace.misses else EXIT_OK


def cmd_workfn(args) -> int:
    tsys = _system(args)
    eps = _epsilon(args)
    profile = system_work_profile(tsys, eps)
    lam, arg = lambda_hat(tsys, eps, profile)
    _emit(formats.profile_csv(profile), args.out)
    print(f"tail_slope: {_fmt(profile.tail_slope)}", file=sys.stderr)
    print(f"lambda_hat: {_fmt(lam)} argmax={_fmt(arg)}", file=sys.stderr)
    return EXIT_OK


def cmd_generate(args) -> int:
    coll = _make_collection(args, _system(args))
    _emit(formats.dump_json(formats.collection_to_dict(coll)), args.out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "workfn": cmd_workfn,
            "generate": cmd_generate, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dagedf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--system", help="task-system JSON file")
        s.add_argument("--collection", help="job-collection JSON file")
        s.add_argument("--processors", "-m", type=int)
        s.add_argument("--speed", default="1", help="processor speed as a/b")
        s.add_argument("--epsilon", default="1", help="approximation parameter as a/b")
        s.add_argument("--pattern", choices=("synchronous", "dense", "random"))
        s.add_argument("--horizon", type=int)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--t", type=int, help="window length for the dense pattern")
        s.add_argument("--task", help="task id for the dense pattern (default: first)")
        s.add_argument("--out", help="output file (default: stdout)")
        s.add_argument("--witness", nargs="?", const="-",
                       help="simulate: write the overload witness report (default: stdout)")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
