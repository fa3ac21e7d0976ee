"""Global rate-monotonic tests on M identical processors.

All tests assume implicit deadlines and RM priority order (the task list
order, with non-decreasing periods).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import KPointInstance
from .factors import solve_capacity_factor
from .taskmodel import Task, TaskModelError, TaskSet, Verdict, tolerance

# 1/2.668: the root of y = ln(2/(1+y)), about 0.3748225
RM_US_THRESHOLD = solve_capacity_factor(2.0, 1.0).root

MODELS = ("sporadic", "dag", "suspending")


def workload_w(task: Task, t: float) -> float:
    """Carry-in workload ``(ceil(t/T) - 1) C + 2 C``."""
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t}")
    return (kernels.snap_ceil(t / task.period) - 1) * task.wcet + 2.0 * task.wcet


def _implicit_rm_problem(taskset: TaskSet, k: int | None = None):
    """Reason the set does not fit the implicit-deadline RM setting, or None."""
    upto = len(taskset) if k is None else k + 1
    for i in range(upto):
        t = taskset[i]
        if t.deadline != t.period:
            return f"task {i} has D != T; global RM tests need implicit deadlines"
    for i in range(1, upto):
        if taskset[i].period < taskset[i - 1].period:
            return f"task {i} breaks RM order (period {taskset[i].period} < {taskset[i - 1].period})"
    return None


def _check_index(taskset: TaskSet, k: int):
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k < len(taskset):
        raise IndexError(f"task index {k!r} out of range for {len(taskset)} tasks")


def _require_cp(taskset: TaskSet, indices):
    for i in indices:
        if taskset[i].critical_path is None:
            raise TaskModelError("DAG test needs a critical path length", i, "critical_path")


@dataclass(frozen=True)
class GlobalSetup:
    """k-point data for global RM: points ``floor(T_k/T_i) T_i`` and ``T_k``."""

    processors: int
    model: str
    effective_demand: float
    points: tuple
    instance: KPointInstance


def effective_demand(task: Task, m: int, model: str) -> float:
    if model == "sporadic":
        return task.wcet
    if model == "dag":
        psi = task.critical_path
        return psi + (task.wcet - psi) / m
    if model == "suspending":
        return task.wcet + task.suspension
    raise ValueError(f"unknown model {model!r}")


def build_global_setup(taskset: TaskSet, k: int, model: str = "sporadic") -> GlobalSetup:
    _check_index(taskset, k)
    if model == "dag":
        _require_cp(taskset, [k])
    m = taskset.processors
    tk = taskset[k].period
    pts = [kernels.snap_floor(tk / taskset[i].period) * taskset[i].period for i in range(k)]
    order = sorted(range(k), key=lambda i: pts[i])
    entries = []
    for i in order:
        ti = taskset[i]
        t_i = max(pts[i], ti.period)
        # W_i(t_j) <= t_i U_i + C_i (j <= i) or t_i U_i + 2 C_i (j > i)
        alpha = (1.0 + ti.period / t_i) / m
        beta = (ti.period / t_i) / m
        entries.append((ti.utilization, alpha, beta))
    demand = effective_demand(taskset[k], m, model)
    inst = KPointInstance(tuple(entries), demand / tk)
    return GlobalSetup(m, model, demand, tuple(pts[i] for i in order) + (tk,), inst)


def grm_naive_test(taskset: TaskSet, k: int, model: str = "sporadic") -> Verdict:
    """Carry-in test restricted to the k points of :class:`GlobalSetup`:
    ``demand_k + sum_{i<k} W_i(t) / M <= t`` for some point ``t``.
    """
    name = "grm-naive"
    _check_index(taskset, k)
    problem = _implicit_rm_problem(taskset, k)
    if problem:
        return Verdict.not_applicable(name, problem, k)
    setup = build_global_setup(taskset, k, model)
    c, p, _ = taskset.arrays(k)
    points = np.array(setup.points, dtype=np.float64)
    ok, t, demand = kernels.carry_in_scan(
        setup.effective_demand, c, p, points, float(taskset.processors), tolerance()
    )
    return Verdict(ok, t, demand, name, f"t={t:g}", True, k)


def grm_closed_form_test(taskset: TaskSet, k: int, model: str = "sporadic", form: str = "either") -> Verdict:
    """Hyperbolic / logarithmic tests for global RM.

    sporadic:   ``(U_k + 2) prod_{j<k}(U_j/M + 1) <= 3`` or
                ``sum_{j<k} U_j/M <= ln(3 / (U_k + 2))``
    dag:        ``(Psi_k/T_k + 2) prod_{j<=k}(U_j/M + 1) <= 3`` or
                ``sum_{j<=k} U_j/M <= ln(3 / (Psi_k/T_k + 2))``
    suspending: ``((C_k + S_k)/T_k + 2) prod_{j<k}(U_j/M + 1) <= 3``

    The DAG product runs over ``j <= k``, the others over ``j < k``.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if form not in ("either", "product", "sum"):
        raise ValueError(f"unknown form {form!r}")
    if model == "suspending" and form == "sum":
        raise ValueError("the self-suspension test has no utilization form")
    name = {"sporadic": "grm", "dag": "grm-dag", "suspending": "grm-suspend"}[model]
    if form == "sum":
        name += "-sum"
    _check_index(taskset, k)
    if model == "dag":
        _require_cp(taskset, [k])
    problem = _implicit_rm_problem(taskset, k)
    if problem:
        return Verdict.not_applicable(name, problem, k)

    m = taskset.processors
    task = taskset[k]
    if model == "sporadic":
        lead = task.utilization
        utils = [taskset[j].utilization for j in range(k)]
    elif model == "dag":
        lead = task.critical_path / task.period
        utils = [taskset[j].utilization for j in range(k + 1)]
    else:
        lead = (task.wcet + task.suspension) / task.period
        utils = [taskset[j].utilization for j in range(k)]

    tol = tolerance()
    prod_value = (lead + 2.0) * math.prod(u / m + 1.0 for u in utils)
    if form in ("either", "product") and prod_value <= 3.0 + tol:
        return Verdict(True, 3.0, prod_value, name, "product form", True, k)
    if model != "suspending":
        sum_value = math.fsum(utils) / m
        sum_bound = math.log(3.0 / (lead + 2.0))
        if form in ("either", "sum"):
            if sum_value <= sum_bound + tol:
                return Verdict(True, sum_bound, sum_value, name, "sum form", True, k)
            if form == "sum":
                return Verdict(False, sum_bound, sum_value, name, "sum form fails", True, k)
    note = "both forms fail" if model != "suspending" and form == "either" else "product form fails"
    return Verdict(False, 3.0, prod_value, name, note, True, k)


def fast_monotonic_test(taskset: TaskSet) -> Verdict:
    """Whole-set DAG test ``(max Psi_i/T_i + 2) prod_i(U_i/M + 1) <= 3``.

    Monotone in every task's parameters, so it suits admission control.
    """
    name = "grm-fast"
    _require_cp(taskset, range(len(taskset)))
    problem = _implicit_rm_problem(taskset)
    if problem:
        return Verdict.not_applicable(name, problem)
    m = taskset.processors
    delta = max(t.critical_path / t.period for t in taskset.tasks)
    value = (delta + 2.0) * math.prod(t.utilization / m + 1.0 for t in taskset.tasks)
    return Verdict.compare(value, 3.0, name, f"delta_max={delta:g}")


def tight_forms(u_max: float, hp_utils, m: int):
    """``((U_max + 1) prod(U_j/M + 1), ln(2/(U_max + 1)) - sum U_j/M)``."""
    prod_value = (u_max + 1.0) * math.prod(u / m + 1.0 for u in hp_utils)
    sum_slack = math.log(2.0 / (u_max + 1.0)) - math.fsum(hp_utils) / m
    return prod_value, sum_slack


def grm_tight_test(taskset: TaskSet, k: int, form: str = "either") -> Verdict:
    """Improved global RM test with ``U_max = max_{j<=k} U_j``:
    ``(U_max + 1) prod_{j<k}(U_j/M + 1) <= 2`` or
    ``sum_{j<k} U_j/M <= ln(2 / (U_max + 1))``.
    """
    if form not in ("either", "product", "sum"):
        raise ValueError(f"unknown form {form!r}")
    name = "grm-tight"
    _check_index(taskset, k)
    problem = _implicit_rm_problem(taskset, k)
    if problem:
        return Verdict.not_applicable(name, problem, k)
    m = taskset.processors
    u_max = max(taskset[j].utilization for j in range(k + 1))
    hp = [taskset[j].utilization for j in range(k)]
    prod_value, _ = tight_forms(u_max, hp, m)
    sum_value = math.fsum(hp) / m
    sum_bound = math.log(2.0 / (u_max + 1.0))
    tol = tolerance()
    if form in ("either", "product") and prod_value <= 2.0 + tol:
        return Verdict(True, 2.0, prod_value, name, "product form", True, k)
    if form in ("either", "sum") and sum_value <= sum_bound + tol:
        return Verdict(True, sum_bound, sum_value, name, "sum form", True, k)
    if form == "sum":
        return Verdict(False, sum_bound, sum_value, name, "sum form fails", True, k)
    return Verdict(False, 2.0, prod_value, name, "both forms fail" if form == "either" else "product form fails", True, k)


def bertogna_test(taskset: TaskSet, k: int) -> Verdict:
    """``sum_{j<=k} U_j <= (M/2)(1 - U_max) + U_max``."""
    name = "bertogna"
    _check_index(taskset, k)
    problem = _implicit_rm_problem(taskset, k)
    if problem:
        return Verdict.not_applicable(name, problem, k)
    m = taskset.processors
    utils = [taskset[j].utilization for j in range(k + 1)]
    u_max = max(utils)
    bound = m / 2.0 * (1.0 - u_max) + u_max
    return Verdict.compare(math.fsum(utils), bound, name, task=k)


def rm_us_classify(taskset: TaskSet, threshold: float = RM_US_THRESHOLD):
    """Split task indices into ``(top, rest)`` for RM-US.

    ``top`` holds tasks with ``U_i > threshold`` (kept in input order);
    ``rest`` is RM-ordered (period, then input index).
    """
    top = [i for i, t in enumerate(taskset.tasks) if t.utilization > threshold]
    rest = [i for i, t in enumerate(taskset.tasks) if t.utilization <= threshold]
    rest.sort(key=lambda i: (taskset[i].period, i))
    return top, rest


def rm_us_order(taskset: TaskSet, threshold: float = RM_US_THRESHOLD) -> TaskSet:
    top, rest = rm_us_classify(taskset, threshold)
    return TaskSet([taskset[i] for i in top + rest], taskset.processors)
