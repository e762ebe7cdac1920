#!/usr/bin/env python3
"""Benchmark the reputation grid-scan kernels: numba jit vs numpy fallback.

Run from the repo root:

    python benchmarks/bench_kernels.py [--resolution 0.02] [--repeat 3]

The numba path also reports its one-off compile time.  Setting
RANSOMGAME_NO_NUMBA=1 before launch restricts the run to the numpy path.
"""

import argparse
import time

import numpy as np

from ransomgame import _kernels
from ransomgame.core import make_instance


def bench(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--resolution", type=float, default=0.02)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    K = int(round(1.0 / args.resolution)) + 1
    print(f"grid resolution {args.resolution} -> {K} points per axis")
    print(f"numba available: {_kernels.HAVE_NUMBA} (backend: {_kernels.BACKEND})")
    print()
    print(f"{'n':>2} {'points':>12} {'numpy (s)':>10} {'numba (s)':>10} {'speedup':>8}")

    for n in (1, 2, 3):
        inst = make_instance(V=500.0, n=n, total_ransom=700.0, decay="linear",
                             sale_ratio=0.7, recovery_cost=5.0)
        R = np.array(inst.ransoms)
        L = np.array(inst.losses)
        A = np.array(inst.sale_profits)
        points = K ** (n + 1)

        t_np, out_np = bench(
            lambda: _kernels.grid_scan(R, L, A, inst.data_value,
                                       inst.recovery_cost, K, backend="numpy"),
            args.repeat,
        )
        if _kernels.HAVE_NUMBA:
            t0 = time.perf_counter()
            _kernels.grid_scan(R, L, A, inst.data_value, inst.recovery_cost, K,
                               backend="numba")
            warm = time.perf_counter() - t0
            t_nb, out_nb = bench(
                lambda: _kernels.grid_scan(R, L, A, inst.data_value,
                                           inst.recovery_cost, K, backend="numba"),
                args.repeat,
            )
            assert out_nb[0] == out_np[0], "backends disagree on the best point"
            print(f"{n:>2} {points:>12} {t_np:>10.4f} {t_nb:>10.4f} "
                  f"{t_np / t_nb:>7.1f}x   (first call incl. compile: {warm:.2f}s)")
        else:
            print(f"{n:>2} {points:>12} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
