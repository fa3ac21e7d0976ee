"""Closed-form response-time upper bounds (experimental).

Both bounds look only at ``C`` and ``U`` of the higher-priority tasks. The
linear bound has held up against the exact response-time iteration in every
test we ran. The hyperbolic bound has not: it ignores the ``C_i`` of the
higher-priority tasks, and sets with a long-period, high-WCET task above a
short one regularly beat it (see the test suite). Use it with care.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .taskmodel import TaskSet, tolerance


@dataclass(frozen=True)
class RtBoundResult:
    bound: float | None
    ordering_used: tuple
    precondition_ok: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "ordering_used": list(self.ordering_used),
            "precondition_ok": self.precondition_ok,
            "note": self.note,
        }


def _check(taskset: TaskSet, n: int):
    if taskset.processors != 1:
        raise ValueError(f"response-time bounds need processors == 1, got {taskset.processors}")
    if isinstance(n, bool) or not isinstance(n, int) or not 0 <= n < len(taskset):
        raise IndexError(f"task index {n!r} out of range for {len(taskset)} tasks")


def rt_bound_linear(taskset: TaskSet, n: int) -> RtBoundResult:
    """``(C_n + sum C_i - sum_i U_i sum_{j>=i} C_j) / (1 - sum U_i)``.

    The higher-priority tasks are reindexed by decreasing period (stable on
    ties) before the inner sums are taken.
    """
    _check(taskset, n)
    total = math.fsum(taskset[i].utilization for i in range(n + 1))
    order = tuple(sorted(range(n), key=lambda i: -taskset[i].period))
    if total >= 1.0:
        return RtBoundResult(None, order, False, f"sum U = {total:.6g} >= 1")
    periods = [taskset[i].period for i in order]
    tied = any(a == b for a, b in zip(periods, periods[1:]))

    wcets = [taskset[i].wcet for i in order]
    utils = [taskset[i].utilization for i in order]
    tail = 0.0
    coupled = 0.0
    for u, c in zip(reversed(utils), reversed(wcets)):
        tail += c
        coupled += u * tail
    hp_u = math.fsum(utils)
    bound = (taskset[n].wcet + math.fsum(wcets) - coupled) / (1.0 - hp_u)
    return RtBoundResult(bound, order, True, "equal periods ordered stably" if tied else "")


def rt_bound_hyperbolic(taskset: TaskSet, n: int) -> RtBoundResult:
    """``C_n / (2 / prod_{i<n}(U_i + 1) - 1)`` when ``prod_{i<=n}(U_i + 1) <= 2``."""
    _check(taskset, n)
    order = tuple(range(n))
    hp = math.prod(taskset[i].utilization + 1.0 for i in order)
    full = hp * (taskset[n].utilization + 1.0)
    if full > 2.0 + tolerance():
        return RtBoundResult(None, order, False, f"prod(U_i + 1) = {full:.6g} > 2")
    return RtBoundResult(taskset[n].wcet / (2.0 / hp - 1.0), order, True)
