#!/usr/bin/env python3
"""Benchmark the compiled Gibbs scan kernel against the pure-Python fallback.

Runs the same seeded sampling workload through both backends across a range
of candidate-pool sizes and reports wall time plus speedup.  Also asserts
the two backends agree bit-for-bit on the recorded group frequencies.

Usage: python benchmarks/bench_gibbs.py [--k 3] [--eta 100] [--theta 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rationales._core import HAVE_COMPILED, gibbs_py

if HAVE_COMPILED:
    from rationales._core import _gibbs


def make_inputs(rng, n, k, eta, theta):
    sal = rng.uniform(0, 1, size=n)
    sim = rng.uniform(0, 1, size=(n, n))
    sim = (sim + sim.T) / 2
    np.fill_diagonal(sim, 0.0)
    init = rng.choice(n, size=k, replace=False).astype(np.int64)
    draws = rng.random((eta + theta) * k)
    return np.ascontiguousarray(sal), np.ascontiguousarray(sim), init, draws


def bench(fn, args, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--eta", type=int, default=100)
    parser.add_argument("--theta", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[10, 25, 50, 100, 250, 500])
    args = parser.parse_args()

    if not HAVE_COMPILED:
        print("compiled kernel not built; benchmarking pure Python only")

    print(f"{'n':>5}  {'python':>10}  {'cython':>10}  {'speedup':>8}  match")
    rng = np.random.default_rng(0)
    for n in args.sizes:
        sal, sim, init, draws = make_inputs(rng, n, args.k, args.eta, args.theta)
        kernel_args = (sal, sim, args.k, args.eta, args.theta, 0.1, 0.01,
                       init, draws)
        t_py, counts_py = bench(gibbs_py.gibbs_counts, kernel_args, args.repeats)
        if HAVE_COMPILED:
            t_cy, counts_cy = bench(_gibbs.gibbs_counts, kernel_args, args.repeats)
            match = counts_py == counts_cy
            print(f"{n:>5}  {t_py * 1e3:>8.2f}ms  {t_cy * 1e3:>8.2f}ms  "
                  f"{t_py / t_cy:>7.1f}x  {match}")
            if not match:
                raise SystemExit("backend results diverged")
        else:
            print(f"{n:>5}  {t_py * 1e3:>8.2f}ms  {'-':>10}  {'-':>8}")


if __name__ == "__main__":
    main()
