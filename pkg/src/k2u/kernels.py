"""Numeric inner loops shared by the exact analyses.

Every kernel exists twice: a scalar loop compiled with numba, and a
vectorised numpy version. ``JIT_ENABLED`` (see :mod:`k2u._jit`) picks which
one the public names point at. Both versions take float64 arrays and return
plain floats/bools so callers never see the difference.

Step functions (``ceil(t/T)``) are evaluated with a relative snap of
``SNAP`` so that ``t = m*T`` computed in floating point lands on ``m`` and
not ``m + 1``.
"""

import math

import numpy as np

from ._jit import JIT_ENABLED, njit

SNAP = 1e-9
# overrun gaps this close (relative to the horizon) count as ties when
# reporting the least-violated point of a failed scan
GAP_TIE = 1e-9

__all__ = [
    "JIT_ENABLED",
    "BACKEND",
    "SNAP",
    "snap_ceil",
    "snap_floor",
    "tda_scan",
    "rta_iterate",
    "dbf_scan",
    "carry_in_scan",
]


@njit(cache=True)
def snap_ceil(q):
    r = math.floor(q + 0.5)
    if abs(q - r) <= SNAP * max(1.0, abs(q)):
        return r
    return math.ceil(q)


@njit(cache=True)
def snap_floor(q):
    r = math.floor(q + 0.5)
    if abs(q - r) <= SNAP * max(1.0, abs(q)):
        return r
    return math.floor(q)


def _snap_ceil_vec(q):
    r = np.floor(q + 0.5)
    close = np.abs(q - r) <= SNAP * np.maximum(1.0, np.abs(q))
    return np.where(close, r, np.ceil(q))


def _snap_floor_vec(q):
    r = np.floor(q + 0.5)
    close = np.abs(q - r) <= SNAP * np.maximum(1.0, np.abs(q))
    return np.where(close, r, np.floor(q))


# --------------------------------------------------------------------------
# time-demand scan: base + sum_i ceil(t/T_i) C_i <= t over release points
# --------------------------------------------------------------------------


@njit(cache=True)
def _tda_demand(base, hp_c, hp_t, t):
    d = base
    for i in range(hp_c.shape[0]):
        d += snap_ceil(t / hp_t[i]) * hp_c[i]
    return d


@njit(cache=True)
def _tda_scan_loop(base, hp_c, hp_t, horizon, tol):
    # earliest feasible point, else the point with the smallest overrun
    best_ok_t = math.inf
    best_ok_d = math.inf
    worst_t = horizon
    worst_d = _tda_demand(base, hp_c, hp_t, horizon)
    worst_gap = worst_d - horizon
    if worst_d <= horizon + tol:
        best_ok_t = horizon
        best_ok_d = worst_d
    for i in range(hp_c.shape[0]):
        m_max = int(snap_floor(horizon / hp_t[i]))
        for m in range(1, m_max + 1):
            t = m * hp_t[i]
            if t > horizon:
                t = horizon
            if t >= best_ok_t:
                break
            d = _tda_demand(base, hp_c, hp_t, t)
            if d <= t + tol:
                best_ok_t = t
                best_ok_d = d
                break
            if d - t < worst_gap:
                worst_gap = d - t
                worst_t = t
                worst_d = d
    if best_ok_t < math.inf:
        return True, best_ok_t, best_ok_d
    # rescan so near-ties go to the earliest point, as in the numpy version
    eps = GAP_TIE * max(1.0, horizon)
    for i in range(hp_c.shape[0]):
        m_max = int(snap_floor(horizon / hp_t[i]))
        for m in range(1, m_max + 1):
            t = min(m * hp_t[i], horizon)
            if t >= worst_t:
                break
            d = _tda_demand(base, hp_c, hp_t, t)
            if d - t <= worst_gap + eps:
                worst_t = t
                worst_d = d
    return False, worst_t, worst_d


def _tda_candidates(hp_t, horizon):
    pts = [np.array([horizon])]
    for ti in hp_t:
        m_max = int(_snap_floor_vec(np.array(horizon / ti)))
        if m_max >= 1:
            pts.append(np.arange(1, m_max + 1, dtype=np.float64) * ti)
    t = np.concatenate(pts)
    return np.minimum(t, horizon)


def _tda_scan_vec(base, hp_c, hp_t, horizon, tol):
    t = _tda_candidates(hp_t, horizon)
    if hp_c.shape[0]:
        demand = base + _snap_ceil_vec(t[:, None] / hp_t[None, :]) @ hp_c
    else:
        demand = np.full_like(t, base)
    ok = demand <= t + tol
    if ok.any():
        i = int(np.argmin(np.where(ok, t, np.inf)))
        return True, float(t[i]), float(demand[i])
    return (False, *_earliest_near_min(t, demand, horizon))


def _earliest_near_min(t, demand, scale):
    gap = demand - t
    near = gap <= gap.min() + GAP_TIE * max(1.0, scale)
    i = int(np.argmin(np.where(near, t, np.inf)))
    return float(t[i]), float(demand[i])


# --------------------------------------------------------------------------
# response-time fixed point R = c + sum_i ceil(R/T_i) C_i
# --------------------------------------------------------------------------


@njit(cache=True)
def _rta_iterate_loop(c, hp_c, hp_t, horizon):
    r = c
    while True:
        nxt = _tda_demand(c, hp_c, hp_t, r)
        if nxt <= r:
            return r
        if nxt > horizon:
            return math.inf
        r = nxt


def _rta_iterate_vec(c, hp_c, hp_t, horizon):
    r = c
    while True:
        nxt = c + float(_snap_ceil_vec(r / hp_t) @ hp_c) if hp_c.shape[0] else c
        if nxt <= r:
            return r
        if nxt > horizon:
            return math.inf
        r = nxt


# --------------------------------------------------------------------------
# EDF demand-bound scan: sum_i dbf_i(t) <= t at every absolute deadline
# --------------------------------------------------------------------------


@njit(cache=True)
def _dbf_total(c, d, p, t):
    s = 0.0
    for i in range(c.shape[0]):
        if t >= d[i] * (1.0 - SNAP):
            jobs = snap_floor((t - d[i]) / p[i]) + 1.0
            if jobs > 0:
                s += jobs * c[i]
    return s


@njit(cache=True)
def _dbf_scan_loop(c, d, p, horizon, tol):
    # returns (feasible, t of first violation or horizon, demand there)
    first_bad = math.inf
    bad_d = 0.0
    for i in range(c.shape[0]):
        m = 0
        while True:
            t = d[i] + m * p[i]
            if t > horizon * (1.0 + SNAP) or t >= first_bad:
                break
            s = _dbf_total(c, d, p, t)
            if s > t + tol:
                first_bad = t
                bad_d = s
                break
            m += 1
    if first_bad < math.inf:
        return False, first_bad, bad_d
    return True, horizon, _dbf_total(c, d, p, horizon)


def _dbf_total_vec(c, d, p, t):
    jobs = _snap_floor_vec((t[:, None] - d[None, :]) / p[None, :]) + 1.0
    jobs = np.where(t[:, None] >= d[None, :] * (1.0 - SNAP), np.maximum(jobs, 0.0), 0.0)
    return jobs @ c


def _dbf_scan_vec(c, d, p, horizon, tol, chunk=8192):
    pts = []
    for di, pi in zip(d, p):
        if di <= horizon * (1.0 + SNAP):
            m_max = int(_snap_floor_vec(np.array((horizon - di) / pi)))
            pts.append(di + np.arange(0, max(m_max, 0) + 1, dtype=np.float64) * pi)
    if not pts:
        return True, horizon, 0.0
    t = np.unique(np.concatenate(pts))
    for lo in range(0, t.shape[0], chunk):
        tt = t[lo : lo + chunk]
        s = _dbf_total_vec(c, d, p, tt)
        bad = s > tt + tol
        if bad.any():
            i = int(np.argmax(bad))
            return False, float(tt[i]), float(s[i])
    return True, horizon, float(_dbf_total_vec(c, d, p, np.array([horizon]))[0])


# --------------------------------------------------------------------------
# carry-in workload scan over given points:
#   base + sum_i ((ceil(t/T_i) - 1) C_i + 2 C_i) / M <= t
# --------------------------------------------------------------------------


@njit(cache=True)
def _carry_in_demand(base, hp_c, hp_t, t, m):
    w = 0.0
    for i in range(hp_c.shape[0]):
        w += (snap_ceil(t / hp_t[i]) + 1.0) * hp_c[i]
    return base + w / m


@njit(cache=True)
def _carry_in_scan_loop(base, hp_c, hp_t, points, m, tol):
    best_gap = math.inf
    for j in range(points.shape[0]):
        t = points[j]
        d = _carry_in_demand(base, hp_c, hp_t, t, m)
        if d <= t + tol:
            return True, t, d
        best_gap = min(best_gap, d - t)
    eps = GAP_TIE * max(1.0, points[points.shape[0] - 1])
    best_t = points[0]
    best_d = 0.0
    for j in range(points.shape[0]):
        best_t = points[j]
        best_d = _carry_in_demand(base, hp_c, hp_t, best_t, m)
        if best_d - best_t <= best_gap + eps:
            break
    return False, best_t, best_d


def _carry_in_scan_vec(base, hp_c, hp_t, points, m, tol):
    if hp_c.shape[0]:
        w = (_snap_ceil_vec(points[:, None] / hp_t[None, :]) + 1.0) @ hp_c
    else:
        w = np.zeros_like(points)
    demand = base + w / m
    ok = demand <= points + tol
    if ok.any():
        i = int(np.argmax(ok))
        return True, float(points[i]), float(demand[i])
    return (False, *_earliest_near_min(points, demand, points[-1]))


LOOP_KERNELS = {
    "tda_scan": _tda_scan_loop,
    "rta_iterate": _rta_iterate_loop,
    "dbf_scan": _dbf_scan_loop,
    "carry_in_scan": _carry_in_scan_loop,
}
NUMPY_KERNELS = {
    "tda_scan": _tda_scan_vec,
    "rta_iterate": _rta_iterate_vec,
    "dbf_scan": _dbf_scan_vec,
    "carry_in_scan": _carry_in_scan_vec,
}

BACKEND = "numba" if JIT_ENABLED else "numpy"
_active = LOOP_KERNELS if JIT_ENABLED else NUMPY_KERNELS

tda_scan = _active["tda_scan"]
rta_iterate = _active["rta_iterate"]
dbf_scan = _active["dbf_scan"]
carry_in_scan = _active["carry_in_scan"]
