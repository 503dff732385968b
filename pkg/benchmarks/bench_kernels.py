"""Compare the compiled and pure-Python Jacobi backends.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from qclone import _kernels, task2
from qclone.qcore import RandomSource, hermitian_eigenvalues


def _random_hermitian(dim, seed):
    g = RandomSource(seed).complex_normal((dim, dim))
    return g + g.conj().T


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    residual = task2.pcm.cloning_residual(task2.f0_family(), (0.14165, 0.57122, 0.57122))
    mats = {"3x3 real (cloning residual)": residual}
    for dim in (4, 8, 16):
        mats[f"{dim}x{dim} complex Hermitian"] = _random_hermitian(dim, dim)

    backends = sorted(_kernels.BACKENDS)
    print(f"backends available: {', '.join(backends)} (default: {_kernels.backend()})")
    header = f"{'case':36s}" + "".join(f"{b:>14s}" for b in backends)
    print(header)
    print("-" * len(header))
    prev = _kernels.backend()
    try:
        for name, m in mats.items():
            n = 2000 if m.shape[0] <= 4 else 200
            row = f"{name + f' x{n}':36s}"
            for b in backends:
                _kernels.set_backend(b)
                row += f"{time_call(lambda: [hermitian_eigenvalues(m) for _ in range(n)], args.repeat):13.4f}s"
            print(row)
        row = f"{'optimize p2 machine (end to end)':36s}"
        for b in backends:
            _kernels.set_backend(b)
            row += f"{time_call(lambda: task2.optimize_machine('p2'), args.repeat):13.4f}s"
        print(row)
    finally:
        _kernels.set_backend(prev)


if __name__ == "__main__":
    main()
