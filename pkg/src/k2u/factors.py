"""Named constants: the speed-up factor and the capacity augmentation factors.

Each constant is the reciprocal of the root of a one-dimensional fixed-point
equation, found by plain bisection so the bracket is never lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

ROOT_TOL = 1e-14
MAX_ITER = 200


@dataclass(frozen=True)
class FactorResult:
    """``factor = 1/root``; ``residual`` is the equation's defect at ``root``.

    ``variable`` is the bisection variable when it differs from ``root``
    (the speed-up solve bisects on ``x`` but reports ``(1 + x)/2``).
    """

    factor: float
    root: float
    residual: float
    variable: float
    iterations: int


def _bisect(g: Callable[[float], float], lo: float, hi: float):
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo, 0
    if ghi == 0.0:
        return hi, 0
    if (glo > 0) == (ghi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]: g(lo)={glo}, g(hi)={ghi}")
    for it in range(1, MAX_ITER + 1):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid, it
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo <= ROOT_TOL:
            return 0.5 * (lo + hi), it
    return 0.5 * (lo + hi), MAX_ITER


def solve_capacity_factor(a: float, b0: float) -> FactorResult:
    """Solve ``y = ln(a / (b0 + y))`` on ``(0, a - b0)``; the factor is ``1/y``.

    ``(3, 2)`` gives the DAG factor 3.62143, ``(2, 1)`` the sporadic 2.668.
    """
    if not (b0 >= 0 and a > b0):
        raise ValueError(f"need a > b0 >= 0, got a={a}, b0={b0}")

    def g(y):
        return y - math.log(a / (b0 + y))

    lo = 0.0 if b0 > 0 else 1e-300
    y, it = _bisect(g, lo, a - b0)
    return FactorResult(1.0 / y, y, abs(g(y)), y, it)


def solve_speedup_factor() -> FactorResult:
    """Intersection of ``(1 + x)/2`` and ``ln(2/(1 + x))`` on ``(0, 1)``.

    The reported root is the common value ``(1 + x)/2 = 0.567143``; the
    factor ``2/(1 + x) = 1.76322``.
    """

    def g(x):
        return (1.0 + x) / 2.0 - math.log(2.0 / (1.0 + x))

    x, it = _bisect(g, 0.0, 1.0)
    value = (1.0 + x) / 2.0
    return FactorResult(2.0 / (1.0 + x), value, abs(g(x)), x, it)


def all_factors() -> dict:
    return {
        "speedup": solve_speedup_factor(),
        "capacity_dag": solve_capacity_factor(3.0, 2.0),
        "capacity_sporadic": solve_capacity_factor(2.0, 1.0),
    }
