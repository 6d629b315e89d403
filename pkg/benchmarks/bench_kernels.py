"""Numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--pairs 200] [--horizon 100000]

Runs the Li-Yorke batch workload (a convergent logistic family, many pairs,
long horizon) on both backends, checks the outputs are bitwise equal and
prints the best wall time of a few repeats.
"""
import argparse
import time

import numpy as np

from nds_chaoslab import kernels
from nds_chaoslab.dynamics import ConvergentFamily, NDSystem, ParameterRule
from nds_chaoslab.spaces import INTERVAL


def best_of(fn, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--horizon", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    sys_ = NDSystem(INTERVAL, ConvergentFamily("logistic", 4.0, ParameterRule("harmonic")))
    rng = np.random.default_rng(0)
    xs = rng.random((args.pairs, 1))
    ys = rng.random((args.pairs, 1))
    ops, params, ends = sys_.real_program(1, args.horizon)

    def run(backend):
        return kernels.run_pair_distances(xs, ys, ops, params, ends, kernels.METRIC_ABS, backend=backend)

    print(f"{args.pairs} pairs x {args.horizon} steps, best of {args.repeats}")
    results = {}
    if kernels.HAVE_NUMBA:
        run("numba")  # compile outside the timing
        t, results["numba"] = best_of(lambda: run("numba"), args.repeats)
        print(f"numba  {t:8.3f} s")
    else:
        print("numba  unavailable (disabled or not installed)")
    t, results["numpy"] = best_of(lambda: run("numpy"), args.repeats)
    print(f"numpy  {t:8.3f} s")
    if len(results) == 2:
        same = np.array_equal(results["numba"].view(np.uint64), results["numpy"].view(np.uint64))
        print("bitwise equal:", same)


if __name__ == "__main__":
    main()
