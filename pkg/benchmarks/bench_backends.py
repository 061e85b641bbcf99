"""Compare the numba and numpy counting kernels on identical trial batches.

Run as `python3 benchmarks/bench_backends.py [--trials N] [--k K] [--n N]`.
The numba path is compiled once (warm-up excluded from timing); both
backends consume the same uniform block, so the outage counts must match
on top of the throughput numbers.
"""

import argparse
import time

import numpy as np

from smrelay._backend import load_kernels
from smrelay.channel import stream_key, trial_uniforms


def time_kernel(fn, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        started = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - started)
    return result, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--k", type=int, default=2)
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--snr-db", type=float, default=30.0)
    parser.add_argument("--r", type=float, default=0.5)
    args = parser.parse_args()

    P = 10.0 ** (args.snr_db / 10.0)
    u = trial_uniforms(stream_key(7, 0), 0, args.trials, args.k)
    imask = np.ones(args.k)

    numba_k = load_kernels("numba")
    numpy_k = load_kernels("numpy")

    cases = (
        ("weighted-sum count", lambda kern: kern.count_ni_outages(u, args.k, args.n, P, args.r)),
        ("log-det count", lambda kern: kern.count_general_outages(u, args.k, args.n, P, args.r, imask)),
    )

    print(f"trials={args.trials} K={args.k} N={args.n} snr={args.snr_db:g} dB r={args.r:g}")
    print(f"{'kernel':<20s} {'backend':<8s} {'count':>8s} {'Mtrials/s':>10s} {'speedup':>8s}")
    for name, call in cases:
        call(numba_k)  # JIT warm-up
        rows = []
        for label, kern in (("numba", numba_k), ("numpy", numpy_k)):
            count, secs = time_kernel(lambda: call(kern))
            rows.append((label, count, args.trials / secs / 1e6, secs))
        base = rows[1][3]
        for label, count, mps, secs in rows:
            print(f"{name:<20s} {label:<8s} {count:>8d} {mps:>10.2f} {base / secs:>7.2f}x")
        if rows[0][1] != rows[1][1]:
            print(f"  WARNING: backend counts differ for {name}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
