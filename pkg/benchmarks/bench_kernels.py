"""Time the numba loop kernels against the numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--sets 300] [--repeat 3]

Both backends are imported side by side from ``k2u.kernels``; the env flag
``K2U_DISABLE_JIT`` only decides which one the analyses use.
"""

import argparse
import time

import numpy as np

from k2u import kernels
from k2u._jit import HAVE_NUMBA
from k2u.multiproc import build_global_setup
from k2u.taskmodel import generate_taskset


def workloads(sets, seed):
    rng = np.random.default_rng(seed)
    tda, dbf, carry = [], [], []
    for _ in range(sets):
        n = int(rng.integers(4, 13))
        ts = generate_taskset(n, float(rng.uniform(0.5, 0.95)), period_range=(1.0, 100.0),
                              deadline_class="constrained", seed=rng)
        c, p, d = ts.arrays()
        for k in range(n):
            tda.append((ts[k].wcet, c[:k].copy(), p[:k].copy(), ts[k].deadline, 1e-12))
        dbf.append((c, d, p, float(rng.uniform(500.0, 5000.0)), 1e-12))
        mts = generate_taskset(n, float(rng.uniform(0.5, 3.0)), processors=4, seed=rng)
        mc, mp, _ = mts.arrays()
        for k in range(n):
            pts = np.array(build_global_setup(mts, k).points)
            carry.append((mts[k].wcet, mc[:k].copy(), mp[:k].copy(), pts, 4.0, 1e-12))
    return {"tda_scan": tda, "dbf_scan": dbf, "carry_in_scan": carry,
            "rta_iterate": [(a[0], a[1], a[2], 1e3 * a[3]) for a in tda]}


def timeit(fn, calls, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in calls:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sets", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        print("numba is not installed: the loop kernels run as plain Python")
    data = workloads(args.sets, args.seed)
    print(f"{'kernel':<15}{'calls':>8}{'loop (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name, calls in data.items():
        loop, vec = kernels.LOOP_KERNELS[name], kernels.NUMPY_KERNELS[name]
        for args_ in calls[:2]:
            loop(*args_)  # compile outside the timed region
        t_loop = timeit(loop, calls, args.repeat)
        t_vec = timeit(vec, calls, args.repeat)
        print(f"{name:<15}{len(calls):>8}{t_loop:>12.4f}{t_vec:>12.4f}{t_vec / t_loop:>9.1f}x")


if __name__ == "__main__":
    main()
