"""Compiled vs pure-Python timings for the LU determinant and the BAE Newton loop.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from twistxxz import _kernels_py, kernels


def bench(label, fn, repeat, number):
    t = min(timeit.repeat(fn, repeat=repeat, number=number)) / number
    print(f"  {label:10s} {t * 1e6:10.1f} us")
    return t


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    impls = [("python", _kernels_py)]
    if kernels.BACKEND == "compiled":
        impls.append(("compiled", kernels))
    else:
        print("compiled extension not available; timing the Python kernels only")

    for n in (4, 8):
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        print(f"lu_det {n}x{n}")
        times = [bench(name, lambda m=m: m.lu_det(a), args.repeat, 2000) for name, m in impls]
        if len(times) == 2:
            print(f"  speedup    {times[0] / times[1]:10.1f}x")

    th = np.zeros(3, dtype=complex)
    x0 = np.array([-1.4, -0.45, 0.5], dtype=complex)
    print("newton_bae N=3 (one start)")
    times = [
        bench(name, lambda m=m: m.newton_bae(x0, th, 1.0, 100, 1e-12, 20, 0), args.repeat, 200)
        for name, m in impls
    ]
    if len(times) == 2:
        print(f"  speedup    {times[0] / times[1]:10.1f}x")


if __name__ == "__main__":
    main()
