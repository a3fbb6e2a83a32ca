"""Compare the compiled scoring kernel against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [n_signals]

Generates one large coded signal array set and times the per-group
accumulation that dominates snapshot scoring. Both backends produce
bit-identical totals; only throughput differs.
"""
import sys
import time

import numpy as np

from gridobs.kernels import _pure

try:
    from gridobs.kernels import _accel
except ImportError:
    _accel = None


def make_arrays(n, n_groups=16, seed=7):
    rng = np.random.default_rng(seed)
    return (
        rng.integers(0, n_groups, size=n, dtype=np.intc),
        rng.uniform(50.0, 3500.0, size=n),
        np.where(rng.random(n) < 0.25, 2.0, 1.0),
        (rng.random(n) < 0.9).astype(np.uint8),
        (rng.random(n) < 0.08).astype(np.uint8),
        n_groups,
    )


def bench(fn, args, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    args = make_arrays(n)
    print(f"{n:,} signals, {args[-1]} groups")

    t_pure, r_pure = bench(_pure.accumulate_group_totals, args)
    print(f"pure   {t_pure * 1e3:10.1f} ms   {n / t_pure / 1e6:8.1f} M signals/s")

    if _accel is None:
        print("accel  not built (pip install -e . --no-build-isolation)")
        return

    t_fast, r_fast = bench(_accel.accumulate_group_totals, args)
    print(f"accel  {t_fast * 1e3:10.1f} ms   {n / t_fast / 1e6:8.1f} M signals/s")
    print(f"speedup: {t_pure / t_fast:.1f}x")

    for a, b in zip(r_pure, r_fast):
        assert np.array_equal(a, b), "backends disagree"
    print("results bit-identical across backends")


if __name__ == "__main__":
    main()
