#!/usr/bin/env python3
"""Throughput comparison of the compiled and NumPy MAD kernels.

Runs the batch raw-MAD computation over standard-normal sample matrices
for a range of sample sizes and prints repetitions-per-second for each
backend.  Usage::

    python benchmarks/kernel_bench.py [--reps 200000]
"""
import argparse
import time

import numpy as np

from madkit._kernel import mad0_batch_compiled, mad0_batch_numpy
from madkit.quantiles import HD, median_weights


def _time(fn, samples, weights, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(samples, weights)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=200_000,
                        help="rows per timed batch (default 200000)")
    args = parser.parse_args()

    backends = [("numpy", mad0_batch_numpy)]
    if mad0_batch_compiled is not None:
        backends.append(("compiled", mad0_batch_compiled))
    else:
        print("note: compiled kernel not built; timing numpy only")

    rng = np.random.default_rng(12345)
    print(f"{'n':>6} " + " ".join(f"{name + ' reps/s':>16}" for name, _ in backends)
          + ("  speedup" if len(backends) == 2 else ""))
    for n in (2, 3, 5, 10, 30, 100, 1000):
        reps = max(1000, args.reps // max(1, n // 10))
        samples = rng.standard_normal((reps, n))
        weights = median_weights(n, HD)
        rates = []
        for _, fn in backends:
            seconds = _time(fn, samples, weights)
            rates.append(reps / seconds)
        line = f"{n:>6} " + " ".join(f"{rate:>16.3e}" for rate in rates)
        if len(rates) == 2:
            line += f"  {rates[1] / rates[0]:>6.2f}x"
        print(line)


if __name__ == "__main__":
    main()
