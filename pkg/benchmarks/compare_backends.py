"""Compare tree-construction speed of the JIT and reference kernel backends.

Runs the same builds with LBKD_BACKEND=numpy and LBKD_BACKEND=numba and
prints per-size timings plus the speedup.  A warmup build per backend is
excluded from timing (JIT compilation, caches).

    python3 benchmarks/compare_backends.py --sizes 100000 1000000 --dims 4
"""

import argparse
import os
import time

import numpy as np


def time_builds(build, coords, k, reps):
    build(coords, k)  # warmup
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        build(coords, k)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    parser.add_argument("--dims", type=int, default=4)
    parser.add_argument("--mode", choices=("round-robin", "widest"), default="round-robin")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"mode={args.mode} dims={args.dims} reps={args.reps} (best of)")
    header = f"{'n':>10}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        coords = rng.random((n, args.dims))
        results = {}
        for backend in ("numpy", "numba"):
            os.environ["LBKD_BACKEND"] = backend
            # import after setting the env so each call dispatches correctly
            from lbkd import builder, widest

            build = widest.build_widest if args.mode == "widest" else builder.build_round_robin
            results[backend] = time_builds(build, coords, args.dims, args.reps)
        speedup = results["numpy"] / results["numba"]
        print(
            f"{n:>10,}  {results['numpy'] * 1000:>8.1f} ms  {results['numba'] * 1000:>8.1f} ms  {speedup:>7.2f}x"
        )


if __name__ == "__main__":
    main()
