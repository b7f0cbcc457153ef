"""Benchmark: compiled Legendre/Christoffel kernels vs the numpy fallback.

Times the workloads the analysis layer actually runs: dense-grid
Christoffel evaluation (minimum certificates), paired value/derivative
evaluation (theorem sweeps), and small-batch evaluation (per-point root
polishing), for both backends.

Run:  python benchmarks/bench_kernels.py [--repeats 7]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from riscoupling import _legendre_py

try:
    from riscoupling import _legendre_cy
except ImportError:
    _legendre_cy = None


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    grid = np.linspace(-1.0, 1.0, 20001)
    angles = np.cos(np.linspace(0.0, np.pi, 181))
    tiny = np.linspace(-0.5, 0.5, 8)

    def certificate(impl):
        for n in range(1, 17):
            impl.christoffel_sum(n, grid)
            impl.christoffel_cd(n, grid)
            impl.christoffel_deriv_form(n, grid)

    def theorem_sweep(impl):
        for n in range(1, 17):
            impl.christoffel_sum(n, angles)

    def eval_pairs(impl):
        for n in range(1, 17):
            impl.legendre_eval(n, grid)

    def small_batches(impl):
        for _ in range(2000):
            impl.legendre_eval(12, tiny)

    return [
        ("certificate grids (3 forms, n=1..16, 20001 pts)", certificate),
        ("theorem sweep (n=1..16, 181 angles)", theorem_sweep),
        ("value+derivative grids (n=1..16, 20001 pts)", eval_pairs),
        ("small batches (2000 x 8 pts, n=12)", small_batches),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    if _legendre_cy is None:
        print("compiled backend not built; timing the numpy fallback only")
    header = f"{'workload':52s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, work in workloads():
        t_py = best_of(lambda: work(_legendre_py), args.repeats)
        if _legendre_cy is not None:
            t_cy = best_of(lambda: work(_legendre_cy), args.repeats)
            print(f"{name:52s} {t_py * 1e3:8.2f}ms {t_cy * 1e3:8.2f}ms {t_py / t_cy:7.1f}x")
        else:
            print(f"{name:52s} {t_py * 1e3:8.2f}ms {'-':>10s} {'-':>8s}")

    if _legendre_cy is not None:
        x = np.linspace(-1.0, 1.0, 4001)
        for n in (1, 7, 16):
            for fn in ("christoffel_sum", "christoffel_cd", "christoffel_deriv_form"):
                a = getattr(_legendre_py, fn)(n, x)
                b = getattr(_legendre_cy, fn)(n, x)
                assert (a == b).all(), f"backend mismatch in {fn} (n={n})"
        print("\nbackends agree bit-for-bit on the comparison grid")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
