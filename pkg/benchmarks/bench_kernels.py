"""Compare the compiled and pure-numpy kernel backends.

Run as: python benchmarks/bench_kernels.py [--tmax N] [--reps R]
Reports per-kernel wall time and the speedup of the compiled extension.
"""
import argparse
import time

import numpy as np

from exchtest import _kernels_py
from exchtest.sources import Markov1, MarkovK, sample

try:
    from exchtest import _kernels_cy
except ImportError:
    _kernels_cy = None


def _time(fn, *args, reps: int) -> float:
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tmax", type=int, default=200_000)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()

    x = sample(Markov1(0.3, 0.7), args.tmax, seed=7)
    x3 = sample(MarkovK(2, (0.9, 0.4, 0.6, 0.1)), args.tmax, seed=8)
    u = np.random.default_rng(1).random(args.tmax)
    cdf = np.array([[0.3, 1.0], [0.8, 1.0]])

    cases = [
        ("kt_log_numerator k=1", "kt_log_numerator", (x, 2, 1)),
        ("kt_log_numerator k=4", "kt_log_numerator", (x3, 2, 4)),
        ("bernoulli_mle_log", "bernoulli_mle_log", (x, 2)),
        ("kt0_split_log_numerator", "kt0_split_log_numerator",
         (x, 2, args.tmax // 2)),
        ("sample_markov1", "sample_markov1", (u, 0.3, 0.7, 0)),
        ("sample_markov_ctx", "sample_markov_ctx",
         (u, cdf, 2, 1, np.zeros(1, dtype=np.int64))),
    ]

    print(f"stream length {args.tmax}, best of {args.reps} runs")
    header = f"{'kernel':<28}{'python':>12}{'cython':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in cases:
        t_py = _time(getattr(_kernels_py, name), *call_args, reps=args.reps)
        if _kernels_cy is None:
            print(f"{label:<28}{t_py * 1e3:>10.2f}ms{'n/a':>12}{'n/a':>10}")
            continue
        t_cy = _time(getattr(_kernels_cy, name), *call_args, reps=args.reps)
        print(f"{label:<28}{t_py * 1e3:>10.2f}ms{t_cy * 1e3:>10.2f}ms"
              f"{t_py / t_cy:>9.1f}x")
    if _kernels_cy is None:
        print("compiled backend not built; showing pure-python times only")


if __name__ == "__main__":
    main()
