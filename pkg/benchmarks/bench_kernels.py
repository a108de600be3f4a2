#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from twinbeam._kernels import _numpy as py_impl

try:
    from twinbeam._kernels import _core as c_impl
except ImportError:
    c_impl = None


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_block_sum(impl):
    rng = np.random.default_rng(0)
    img = rng.poisson(100.0, (512, 512)).astype(float)
    return timeit(lambda: [impl.block_sum(img, n) for n in (1, 2, 4, 5, 8, 10, 16, 20, 40)])


def bench_deposit(impl):
    rng = np.random.default_rng(1)
    rows = rng.integers(0, 170, 2_000_000)
    cols = rng.integers(0, 512, 2_000_000)

    def run():
        out = np.zeros((170, 512))
        impl.deposit(out, rows, cols)

    return timeit(run, repeat=5)


def bench_deposit_weighted(impl):
    rng = np.random.default_rng(2)
    rows = rng.integers(0, 170, 1_000_000)
    cols = rng.integers(0, 512, 1_000_000)
    w = rng.exponential(1.0, 1_000_000)

    def run():
        out = np.zeros((170, 512))
        impl.deposit_weighted(out, rows, cols, w)

    return timeit(run, repeat=5)


def bench_pearson(impl):
    rng = np.random.default_rng(3)
    a = rng.normal(size=(120, 120))
    b = np.roll(a, (2, -3), axis=(0, 1))
    return timeit(lambda: impl.pearson_shift_map(a, b, 10, 10), repeat=3)


BENCHES = [
    ("block_sum 512x512, 9 bin sizes", bench_block_sum),
    ("deposit 2e6 counts", bench_deposit),
    ("deposit_weighted 1e6 counts", bench_deposit_weighted),
    ("pearson_shift_map 120x120, r=10", bench_pearson),
]


def main():
    if c_impl is None:
        print("compiled kernels unavailable; showing the fallback alone\n")
    header = f"{'kernel':36s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, bench in BENCHES:
        t_py = bench(py_impl)
        if c_impl is not None:
            t_c = bench(c_impl)
            print(f"{name:36s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms {t_py / t_c:7.1f}x")
        else:
            print(f"{name:36s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
