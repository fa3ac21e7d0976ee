"""Test ids used by the command line and the sweep harness.

Every entry maps a task set (and, for per-task tests, a 0-based task index)
to a :class:`Verdict`. Tests that do not fit the set, for example a
uniprocessor test on four processors, come back not-applicable instead of
raising, so a sweep can keep going.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import multiproc, rta_bounds, uniproc
from .taskmodel import TaskSet, Verdict


@dataclass(frozen=True)
class TestSpec:
    name: str
    per_task: bool
    run: Callable
    experimental: bool = False
    description: str = ""


def _uni(name, ts: TaskSet):
    if ts.processors != 1:
        return Verdict.not_applicable(name, f"uniprocessor test, set has {ts.processors} processors")
    return None


def _tda(ts, k, opts):
    if (v := _uni("tda", ts)) is not None:
        return v
    if ts[k].deadline > ts[k].period:
        return Verdict.not_applicable("tda", "D_k > T_k: use busy-window", k)
    return uniproc.tda_exact(ts, k)


def _fp(form):
    name = "fp-sum" if form == "sum" else "fp-hyperbolic"

    def run(ts, k, opts):
        if (v := _uni(name, ts)) is not None:
            return v
        arbitrary = ts[k].deadline > ts[k].period
        return uniproc.fp_hyperbolic_test(ts, k, opts.get("f", 1), arbitrary, form)

    return run


def _busy(ts, k, opts):
    if (v := _uni("busy-window", ts)) is not None:
        return v
    if ts[k].deadline <= ts[k].period:
        return Verdict.not_applicable("busy-window", "D_k <= T_k: use tda", k)
    return uniproc.busy_window_sufficient(ts, k)


def _edf(ts, opts):
    if (v := _uni("edf-dbf", ts)) is not None:
        return v
    total = sum(t.utilization for t in ts.tasks)
    if total > 1.0:
        return Verdict(False, 1.0, total, "edf-dbf", "total utilization > 1")
    try:
        return uniproc.edf_dbf_feasible(ts)
    except ValueError as exc:
        return Verdict.not_applicable("edf-dbf", str(exc))


def _rt(fn, name):
    def run(ts, k, opts):
        if (v := _uni(name, ts)) is not None:
            return v
        res = fn(ts, k)
        if not res.precondition_ok:
            return Verdict.not_applicable(name, res.note, k)
        note = f"R <= {res.bound:g}" + (f"; {res.note}" if res.note else "")
        return Verdict.compare(res.bound, ts[k].deadline, name, note, k)

    return run


def _rm_us(ts, opts):
    top, rest = multiproc.rm_us_classify(ts)
    note = f"top={[i + 1 for i in top]} rm={[i + 1 for i in rest]}"
    return Verdict(True, multiproc.RM_US_THRESHOLD, float(len(top)), "rm-us", note)


TESTS = {
    spec.name: spec
    for spec in [
        TestSpec("tda", True, _tda, description="exact time-demand analysis (D <= T)"),
        TestSpec("fp-hyperbolic", True, _fp("either"), description="k-point hyperbolic or utilization test"),
        TestSpec("fp-sum", True, _fp("sum"), description="k-point utilization form alone"),
        TestSpec("busy-window", True, _busy, description="single busy window test (D > T)"),
        TestSpec("edf-dbf", False, _edf, description="EDF demand-bound feasibility"),
        TestSpec("grm-naive", True, lambda ts, k, o: multiproc.grm_naive_test(ts, k),
                 description="global RM carry-in test at k points"),
        TestSpec("grm", True, lambda ts, k, o: multiproc.grm_closed_form_test(ts, k, "sporadic"),
                 description="global RM hyperbolic or log test"),
        TestSpec("grm-sum", True, lambda ts, k, o: multiproc.grm_closed_form_test(ts, k, "sporadic", "sum"),
                 description="global RM log form alone"),
        TestSpec("grm-dag", True, lambda ts, k, o: multiproc.grm_closed_form_test(ts, k, "dag"),
                 description="global RM test for DAG tasks"),
        TestSpec("grm-suspend", True, lambda ts, k, o: multiproc.grm_closed_form_test(ts, k, "suspending"),
                 description="global RM test for self-suspending tasks"),
        TestSpec("grm-fast", False, lambda ts, o: multiproc.fast_monotonic_test(ts),
                 description="linear-time whole-set DAG test"),
        TestSpec("grm-tight", True, lambda ts, k, o: multiproc.grm_tight_test(ts, k),
                 description="improved global RM test"),
        TestSpec("bertogna", True, lambda ts, k, o: multiproc.bertogna_test(ts, k),
                 description="utilization baseline for global RM"),
        TestSpec("rm-us", False, _rm_us, description="RM-US priority classes (classification only)"),
        TestSpec("rt-linear", True, _rt(rta_bounds.rt_bound_linear, "rt-linear"), True,
                 "linear response-time bound vs. D"),
        TestSpec("rt-hyperbolic", True, _rt(rta_bounds.rt_bound_hyperbolic, "rt-hyperbolic"), True,
                 "hyperbolic response-time bound vs. D (unsound, see README)"),
    ]
}

DAG_TESTS = {"grm-dag", "grm-fast"}


def run_test(name: str, taskset: TaskSet, task: int | None = None, **opts):
    """Verdicts for ``task`` (0-based), or for every task when ``None``.

    Whole-set tests ignore ``task`` and return a one-element list.
    """
    spec = TESTS[name]
    if not spec.per_task:
        return [spec.run(taskset, opts)]
    indices = range(len(taskset)) if task is None else [task]
    return [spec.run(taskset, k, opts) for k in indices]


def set_accepted(name: str, taskset: TaskSet, **opts) -> bool:
    """Whole-set outcome: every task accepted (stops at the first rejection)."""
    spec = TESTS[name]
    if not spec.per_task:
        return spec.run(taskset, opts).accepted
    return all(spec.run(taskset, k, opts).accepted for k in range(len(taskset)))
