"""Command line front end.

    k2u analyze --input set.json --test tda --task all
    k2u sweep --n 5 --processors 1 --util 0.1:0.9:0.1 --sets 100 --seed 1 \\
        --tests tda,fp-hyperbolic --out sweep.csv
    k2u solve-factors

Exit status of ``analyze``: 0 when every verdict accepts, 1 when any
rejects (or the test does not apply), 2 on usage or input errors.
Task indices on the command line and in reports are 1-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import registry
from .factors import all_factors
from .taskmodel import DEADLINE_CLASSES, TaskModelError, generate_taskset, parse_taskset

CSV_HEADER = ["test", "n", "m", "util", "sets", "accepted", "ratio", "seed"]


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# analyze
# --------------------------------------------------------------------------


def run_analyze(args) -> tuple[int, dict]:
    if args.test not in registry.TESTS:
        raise UsageError(f"unknown test {args.test!r}; known: {', '.join(registry.TESTS)}")
    spec = registry.TESTS[args.test]
    if spec.experimental and not args.experimental_rt_bounds:
        raise UsageError(f"{args.test} is experimental; pass --experimental-rt-bounds")
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    ts = parse_taskset(text)
    if args.processors is not None:
        if args.processors < 1:
            raise UsageError("--processors must be >= 1")
        ts = ts.with_processors(args.processors)
    if args.f < 1:
        raise UsageError("--f must be >= 1")

    task = None
    if args.task != "all":
        try:
            task = int(args.task) - 1
        except ValueError:
            raise UsageError(f"--task must be an integer or 'all', got {args.task!r}") from None
        if not 0 <= task < len(ts):
            raise UsageError(f"--task {args.task} out of range 1..{len(ts)}")

    if args.test in registry.DAG_TESTS:
        # a missing critical path is an input error, not a rejection
        needed = range(len(ts)) if task is None or not spec.per_task else range(task, task + 1)
        for i in needed:
            if ts[i].critical_path is None:
                raise TaskModelError(f"missing required field for {args.test}", i, "cp")

    verdicts = registry.run_test(args.test, ts, task, f=args.f)
    rows = []
    for v in verdicts:
        d = v.to_dict()
        if d["task"] is not None:
            d["task"] += 1
        rows.append(d)
    accepted = all(v.accepted for v in verdicts)
    report = {
        "test": args.test,
        "input": args.input,
        "processors": ts.processors,
        "accepted": accepted,
        "verdicts": rows,
    }
    return (0 if accepted else 1), report


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------


def parse_grid(text: str) -> list:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--util must be LO:HI:STEP, got {text!r}") from None
    if not (lo > 0 and hi >= lo and step > 0):
        raise UsageError(f"--util needs 0 < LO <= HI and STEP > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def parse_range(text: str) -> tuple:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--periods must be LO:HI, got {text!r}") from None
    if not 0 < lo < hi:
        raise UsageError(f"--periods needs 0 < LO < HI, got {text!r}")
    return lo, hi


def _sweep_point(job) -> list:
    """Accept counts for every test at one grid point, in test order."""
    point_idx, util, cfg = job
    rng = np.random.default_rng(np.random.SeedSequence([cfg["seed"], point_idx]))
    counts = [0] * len(cfg["tests"])
    for _ in range(cfg["sets"]):
        ts = generate_taskset(
            cfg["n"], util, cfg["periods"], cfg["deadlines"], rng, cfg["m"], cfg["model"]
        )
        for j, name in enumerate(cfg["tests"]):
            counts[j] += registry.set_accepted(name, ts, f=cfg["f"])
    return counts


def run_sweep(args) -> str:
    tests = [t for t in args.tests.split(",") if t]
    if not tests:
        raise UsageError("--tests is empty")
    for t in tests:
        if t not in registry.TESTS:
            raise UsageError(f"unknown test {t!r}")
        if registry.TESTS[t].experimental and not args.experimental_rt_bounds:
            raise UsageError(f"{t} is experimental; pass --experimental-rt-bounds")
    if args.n < 1 or args.sets < 1 or args.processors < 1 or args.workers < 1:
        raise UsageError("--n, --sets, --processors and --workers must be >= 1")
    grid = parse_grid(args.util)
    if grid[-1] > args.n:
        raise UsageError(f"utilization {grid[-1]} exceeds n={args.n}")
    model = args.model
    if model == "auto":
        model = "dag" if any(t in registry.DAG_TESTS for t in tests) else (
            "suspending" if "grm-suspend" in tests else "sporadic"
        )
    cfg = {
        "n": args.n,
        "m": args.processors,
        "sets": args.sets,
        "seed": args.seed,
        "tests": tests,
        "periods": parse_range(args.periods),
        "deadlines": args.deadlines,
        "model": model,
        "f": args.f,
    }
    jobs = [(i, u, cfg) for i, u in enumerate(grid)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(job) for job in jobs]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for u, counts in zip(grid, results):
        for name, acc in zip(tests, counts):
            writer.writerow([name, args.n, args.processors, repr(u), args.sets, acc, repr(acc / args.sets), args.seed])
    text = buf.getvalue()
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}") from None
    return text


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="k2u", description="k-point schedulability tests")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run one test on a JSON task set")
    a.add_argument("--input", required=True)
    a.add_argument("--test", required=True)
    a.add_argument("--task", default="all", help="1-based task index or 'all'")
    a.add_argument("--processors", type=int)
    a.add_argument("--f", type=int, default=1, help="integer f for fp-hyperbolic")
    a.add_argument("--experimental-rt-bounds", action="store_true")

    s = sub.add_parser("sweep", help="acceptance ratio over a utilization grid")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--processors", type=int, default=1)
    s.add_argument("--util", required=True, help="LO:HI:STEP total utilization")
    s.add_argument("--sets", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tests", required=True, help="comma separated test ids")
    s.add_argument("--out", required=True)
    s.add_argument("--deadlines", choices=DEADLINE_CLASSES, default="implicit")
    s.add_argument("--periods", default="10:1000", help="LO:HI, log-uniform")
    s.add_argument("--model", choices=("auto", "sporadic", "dag", "suspending"), default="auto")
    s.add_argument("--f", type=int, default=1)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--experimental-rt-bounds", action="store_true")

    sub.add_parser("solve-factors", help="print the speed-up and capacity factors")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2

    try:
        if args.command == "analyze":
            status, report = run_analyze(args)
            print(json.dumps(report, indent=2))
            return status
        if args.command == "sweep":
            text = run_sweep(args)
            print(f"wrote {text.count(chr(10)) - 1} rows to {args.out}")
            return 0
        out = {}
        for key, res in all_factors().items():
            out[key] = {
                "factor": res.factor,
                "root": res.root,
                "residual": res.residual,
                "iterations": res.iterations,
            }
        print(json.dumps(out, indent=2))
        return 0
    except (UsageError, TaskModelError, ValueError) as exc:
        kind = "input error" if isinstance(exc, TaskModelError) else "error"
        print(f"k2u: {kind}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
