"""Uniprocessor fixed-priority analyses.

Exact oracles (time-demand analysis, response-time iteration, EDF demand
bound) and the sufficient tests built on the k-point framework for
constrained and arbitrary deadlines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

from . import kernels
from .core import KPointInstance
from .taskmodel import TaskSet, Verdict, tolerance


def _require_uniprocessor(taskset: TaskSet):
    if taskset.processors != 1:
        raise ValueError(f"uniprocessor analysis needs processors == 1, got {taskset.processors}")


def _check_index(taskset: TaskSet, k: int):
    if isinstance(k, bool) or not isinstance(k, int) or not 0 <= k < len(taskset):
        raise IndexError(f"task index {k!r} out of range for {len(taskset)} tasks")


def tda_exact(taskset: TaskSet, k: int) -> Verdict:
    """Exact time-demand analysis for task ``k`` (0-based) with ``D_k <= T_k``.

    Checks ``C_k + sum_{i<k} ceil(t/T_i) C_i <= t`` at every release of a
    higher-priority task in ``(0, D_k]`` and at ``D_k``. On acceptance the
    verdict reports the earliest such point.
    """
    _require_uniprocessor(taskset)
    _check_index(taskset, k)
    task = taskset[k]
    if task.deadline > task.period:
        raise ValueError(
            f"task {k} has D > T; time-demand analysis covers D <= T only, "
            "use busy_window_sufficient"
        )
    c, p, _ = taskset.arrays(k)
    ok, t, demand = kernels.tda_scan(task.wcet, c, p, task.deadline, tolerance())
    return Verdict(ok, t, demand, "tda", f"t={t:g}", True, k)


def rta_fixed_point(taskset: TaskSet, k: int, horizon: float | None = None) -> float:
    """Least fixed point of ``R = C_k + sum_{i<k} ceil(R/T_i) C_i``.

    Returns ``math.inf`` when the iteration passes ``horizon``
    (default ``1000 * T_k``).
    """
    _require_uniprocessor(taskset)
    _check_index(taskset, k)
    task = taskset[k]
    if horizon is None:
        horizon = 1e3 * task.period
    c, p, _ = taskset.arrays(k)
    return float(kernels.rta_iterate(task.wcet, c, p, float(horizon)))


def dbf(task, t: float) -> float:
    """Demand bound ``max(0, floor((t - D)/T) + 1) * C``."""
    if t < task.deadline * (1.0 - kernels.SNAP):
        return 0.0
    jobs = kernels.snap_floor((t - task.deadline) / task.period) + 1
    return max(0, jobs) * task.wcet


def _default_dbf_horizon(taskset: TaskSet) -> float:
    periods = [t.period for t in taskset.tasks]
    if all(float(p).is_integer() for p in periods):
        hyper = reduce(math.lcm, (int(p) for p in periods))
        return float(hyper + max(t.deadline for t in taskset.tasks))
    total_u = sum(t.utilization for t in taskset.tasks)
    if total_u >= 1.0:
        raise ValueError("total utilization >= 1 with non-integer periods; pass an explicit horizon")
    return max(t.deadline for t in taskset.tasks) + 2.0 * sum(t.wcet for t in taskset.tasks) / (1.0 - total_u)


def edf_dbf_feasible(taskset: TaskSet, horizon: float | None = None) -> Verdict:
    """EDF feasibility: ``sum_i dbf_i(t) <= t`` at every deadline up to ``horizon``.

    The default horizon is the hyperperiod (plus the largest deadline) for
    integer periods, else ``max D + 2 sum C / (1 - U)``.
    """
    _require_uniprocessor(taskset)
    if horizon is None:
        horizon = _default_dbf_horizon(taskset)
    if not horizon > 0:
        raise ValueError("horizon must be > 0")
    c, p, d = taskset.arrays()
    ok, t, demand = kernels.dbf_scan(c, d, p, float(horizon), tolerance())
    note = f"t={t:g}" if not ok else f"checked up to {horizon:g}"
    return Verdict(ok, t, demand, "edf-dbf", note)


# --------------------------------------------------------------------------
# k-point construction
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstrainedKPointSetup:
    """k-point instance for task k plus the bookkeeping that produced it.

    ``points`` lists ``floor(D_k/T_i) T_i`` for the hp1 tasks in test
    order, followed by ``D_k``.
    """

    instance: KPointInstance
    virtual_wcet: float
    hp1_indices: tuple
    hp2_indices: tuple
    points: tuple


def build_kpoint_constrained(taskset: TaskSet, k: int, arbitrary: bool = False) -> ConstrainedKPointSetup:
    """Split ``hp(k)`` by ``T_i < D_k`` and build the k-point coefficients.

    hp1 tasks keep ``alpha_i = 1``, ``beta_i = T_i / t_i``; hp2 tasks fold
    into the virtual WCET. With ``arbitrary`` the own demand is
    ``ceil(D_k/T_k) C_k`` (single busy window).
    """
    _require_uniprocessor(taskset)
    _check_index(taskset, k)
    task = taskset[k]
    dk = task.deadline
    if not arbitrary and dk > task.period:
        raise ValueError(f"task {k} has D > T; pass arbitrary=True")

    hp1, hp2 = [], []
    for i in range(k):
        (hp1 if taskset[i].period < dk else hp2).append(i)
    own = kernels.snap_ceil(dk / task.period) * task.wcet if arbitrary else task.wcet
    virtual = own + math.fsum(taskset[i].wcet for i in hp2)

    pts = {i: kernels.snap_floor(dk / taskset[i].period) * taskset[i].period for i in hp1}
    order = sorted(hp1, key=lambda i: pts[i])  # stable on ties
    entries = []
    for i in order:
        ti = taskset[i]
        beta = min(1.0, ti.period / pts[i])
        entries.append((ti.utilization, 1.0, beta))
    inst = KPointInstance(tuple(entries), virtual / dk)
    return ConstrainedKPointSetup(
        inst, virtual, tuple(order), tuple(hp2), tuple(pts[i] for i in order) + (dk,)
    )


def fp_hyperbolic_test(
    taskset: TaskSet,
    k: int,
    f: int = 1,
    arbitrary: bool = False,
    form: str = "either",
) -> Verdict:
    """Hyperbolic / utilization test for fixed-priority task ``k``.

    ``f = 1``: ``(C'/D_k + 1) prod_{hp1}(U_j + 1) <= 2`` or
    ``C'/D_k + sum_{hp1} U_j <= k (2^(1/k) - 1)``.

    ``f >= 2`` tightens both forms to ``beta = 1/f`` and needs
    ``f T_i <= D_k`` for the hp1 tasks. With ``arbitrary`` and ``f >= 2``
    the RM variant applies: every hp task and task k itself must satisfy
    ``f T <= D_k`` and ``C'/(f D_k)`` is replaced by ``U_k / f``.

    ``form`` restricts the verdict to ``"product"`` or ``"sum"``.
    """
    name = "fp-hyperbolic" if form != "sum" else "fp-sum"
    if form not in ("either", "product", "sum"):
        raise ValueError(f"unknown form {form!r}")
    if isinstance(f, bool) or not isinstance(f, int) or f < 1:
        raise ValueError(f"f must be a positive integer, got {f!r}")
    _require_uniprocessor(taskset)
    _check_index(taskset, k)
    task = taskset[k]
    dk = task.deadline
    if not arbitrary and dk > task.period:
        return Verdict.not_applicable(name, "D_k > T_k: rerun with arbitrary deadlines", k)

    setup = build_kpoint_constrained(taskset, k, arbitrary)
    hp1_utils = setup.instance.utils
    tol = tolerance()

    if f >= 2:
        if arbitrary:
            bad = [i for i in range(k + 1) if f * taskset[i].period > dk * (1 + 1e-12)]
            if bad:
                return Verdict.not_applicable(name, f"f*T_i <= D_k fails for tasks {bad}", k)
            hp1_utils = [taskset[i].utilization for i in range(k)]
            scaled_own = task.utilization / f
            sum_lhs = math.fsum(hp1_utils) + task.utilization
        else:
            bad = [i for i in setup.hp1_indices if f * taskset[i].period > dk * (1 + 1e-12)]
            if bad:
                return Verdict.not_applicable(name, f"f*T_i <= D_k fails for hp1 tasks {bad}", k)
            scaled_own = setup.instance.c_over_t / f
            sum_lhs = setup.instance.c_over_t + math.fsum(hp1_utils)
    else:
        scaled_own = setup.instance.c_over_t
        sum_lhs = setup.instance.c_over_t + math.fsum(hp1_utils)

    prod_value = (scaled_own + 1.0) * math.prod(u / f + 1.0 for u in hp1_utils)
    prod_bound = (f + 1.0) / f
    # full priority level k (1-based) as in the printed bound, not |hp1| + 1
    level = k + 1
    sum_bound = f * level * math.expm1(math.log((f + 1.0) / f) / level)

    prod_ok = prod_value <= prod_bound + tol
    sum_ok = sum_lhs <= sum_bound + tol
    if form in ("either", "product") and prod_ok:
        return Verdict(True, prod_bound, prod_value, name, "product form", True, k)
    if form in ("either", "sum") and sum_ok:
        return Verdict(True, sum_bound, sum_lhs, name, "sum form", True, k)
    if form == "sum":
        return Verdict(False, sum_bound, sum_lhs, name, "sum form fails", True, k)
    return Verdict(False, prod_bound, prod_value, name, "both forms fail" if form == "either" else "product form fails", True, k)


def busy_window_sufficient(taskset: TaskSet, k: int) -> Verdict:
    """Single-busy-window test for ``D_k > T_k``:
    ``ceil(D_k/T_k) C_k + sum_{i<k} ceil(t/T_i) C_i <= t`` for some ``t <= D_k``.
    """
    _require_uniprocessor(taskset)
    _check_index(taskset, k)
    task = taskset[k]
    if task.deadline <= task.period:
        raise ValueError(f"task {k} has D <= T; use tda_exact")
    base = kernels.snap_ceil(task.deadline / task.period) * task.wcet
    c, p, _ = taskset.arrays(k)
    ok, t, demand = kernels.tda_scan(float(base), c, p, task.deadline, tolerance())
    return Verdict(ok, t, demand, "busy-window", f"t={t:g}", True, k)


def speedup_witness(taskset: TaskSet, k: int) -> float:
    """``max((C_k' + sum_{hp1} dbf_i(D_k)) / D_k, sum_{hp1} U_i)``.

    For a DM-ordered constrained set, this exceeds ``1/1.76322`` whenever
    :func:`fp_hyperbolic_test` rejects task ``k``.
    """
    setup = build_kpoint_constrained(taskset, k)
    dk = taskset[k].deadline
    load = (setup.virtual_wcet + math.fsum(dbf(taskset[i], dk) for i in setup.hp1_indices)) / dk
    return max(load, math.fsum(setup.instance.utils))


def tda_all(taskset: TaskSet) -> bool:
    return all(tda_exact(taskset, k).accepted for k in range(len(taskset)))
