"""The k-point effective test and the bounds derived from it.

A k-point effective test for task k checks whether some point
``t_j`` in ``t_1 <= ... <= t_k`` satisfies

    C_k + sum_i alpha_i t_i U_i + sum_{i<j} beta_i t_i U_i <= t_j.

Once the per-task coefficients are known, the points themselves drop out
and only ``(U_i, alpha_i, beta_i)`` and ``C_k / t_k`` matter. Those are
carried by :class:`KPointInstance`; the functions below turn them into
verdicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .taskmodel import Verdict


@dataclass(frozen=True)
class KPointInstance:
    """Coefficients of a k-point effective test.

    ``entries`` holds one ``(u, alpha, beta)`` triple per higher-priority
    task, in the order of the test points; it is empty when ``k = 1``.
    """

    entries: tuple
    c_over_t: float

    def __post_init__(self):
        entries = tuple((float(u), float(a), float(b)) for u, a, b in self.entries)
        object.__setattr__(self, "entries", entries)
        for i, (u, a, b) in enumerate(entries):
            if not 0.0 < u <= 1.0:
                raise ValueError(f"entry {i}: u must lie in (0, 1], got {u}")
            if not a > 0.0:
                raise ValueError(f"entry {i}: alpha must be > 0, got {a}")
            if not b > 0.0:
                raise ValueError(f"entry {i}: beta must be > 0, got {b}")
        if not self.c_over_t > 0.0:
            raise ValueError(f"c_over_t must be > 0, got {self.c_over_t}")

    @classmethod
    def uniform(cls, utils: Iterable[float], alpha: float, beta: float, c_over_t: float):
        return cls(tuple((u, alpha, beta) for u in utils), c_over_t)

    @property
    def k(self) -> int:
        return len(self.entries) + 1

    @property
    def utils(self) -> list:
        return [u for u, _, _ in self.entries]

    def max_alpha(self) -> float:
        return max((a for _, a, _ in self.entries), default=0.0)

    def max_beta(self) -> float:
        return max((b for _, _, b in self.entries), default=0.0)


def _check_coefficients(inst: KPointInstance, alpha: float, beta: float):
    if not alpha > 0 or not beta > 0:
        raise ValueError(f"alpha and beta must be > 0, got alpha={alpha}, beta={beta}")
    # relative slack so that e.g. beta_i = T_i / t_i computed as 1/f rounds fine
    if inst.max_alpha() > alpha * (1 + 1e-12) or inst.max_beta() > beta * (1 + 1e-12):
        raise ValueError(
            f"alpha={alpha}, beta={beta} must bound every entry "
            f"(max alpha {inst.max_alpha()}, max beta {inst.max_beta()})"
        )


def hyperbolic_threshold(utils: Sequence[float], alpha: float, beta: float) -> float:
    """Largest admissible ``C_k / t_k``: ``(a/b + 1) / prod(b u + 1) - a/b``."""
    ratio = alpha / beta
    prod = math.prod(beta * u + 1.0 for u in utils)
    return (ratio + 1.0) / prod - ratio


def hyperbolic_bound(inst: KPointInstance, alpha: float, beta: float) -> Verdict:
    _check_coefficients(inst, alpha, beta)
    bound = hyperbolic_threshold(inst.utils, alpha, beta)
    return Verdict.compare(inst.c_over_t, bound, "hyperbolic")


def utilization_bound_constrained(k: int, alpha: float, beta: float) -> float:
    """Threshold on ``C_k/t_k + sum U_i`` for a k-point test.

    Branches are taken in order: the first condition that holds wins. For
    ``k = 1`` the middle branch would need a 0-th root, so it is skipped
    (with ``beta > 0`` it cannot be selected anyway).
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    if not alpha > 0 or not beta > 0:
        raise ValueError(f"alpha and beta must be > 0, got alpha={alpha}, beta={beta}")
    root = (alpha + beta) ** (1.0 / k)
    if root < 1.0:
        return 1.0
    if k >= 2 and root < alpha:
        # expm1/log1p keep precision when k is huge
        return (k - 1) * math.expm1(math.log1p(beta / alpha) / (k - 1)) / beta
    grow = math.expm1(math.log(alpha + beta) / k)  # root - 1
    return ((k - 1) * grow + (grow + 1.0 - alpha)) / beta


def utilization_bound_exclusive(inst: KPointInstance, alpha: float, beta: float) -> Verdict:
    """Accept when ``beta * sum U_i <= ln((a/b + 1) / (C_k/t_k + a/b))``."""
    _check_coefficients(inst, alpha, beta)
    ratio = alpha / beta
    bound = math.log((ratio + 1.0) / (inst.c_over_t + ratio))
    value = beta * math.fsum(inst.utils)
    note = "bound nonpositive" if bound <= 0 else ""
    return Verdict.compare(value, bound, "utilization-exclusive", note)


def extreme_points_threshold(entries: Sequence) -> float:
    """``1 - sum_i u_i (a_i + b_i) / prod_{j>=i} (b_j u_j + 1)``."""
    total = 0.0
    tail = 1.0
    for u, a, b in reversed(entries):
        tail *= b * u + 1.0
        total += u * (a + b) / tail
    return 1.0 - total


def extreme_points_bound(inst: KPointInstance) -> Verdict:
    """Per-task coefficient test; entry order matters (test-point order)."""
    bound = extreme_points_threshold(inst.entries)
    if bound <= 0:
        return Verdict(False, bound, inst.c_over_t, "extreme-points", "bound nonpositive")
    return Verdict.compare(inst.c_over_t, bound, "extreme-points")
