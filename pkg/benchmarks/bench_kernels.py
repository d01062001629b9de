"""Throughput comparison of the compiled and NumPy evaluation kernels.

Run as ``python benchmarks/bench_kernels.py``.  The workload mirrors the
eigensolver's hot loop: evaluating a basis of ~100 plane-wave products for a
few dozen states on tens of thousands of interior/boundary points.
"""

import time

import numpy as np

from echolab import _kernels
from echolab._kernels import reference

try:
    from echolab._kernels import _fastwave
except ImportError:
    _fastwave = None


def make_workload(n_points, n_waves, n_states, seed=0):
    rng = np.random.default_rng(seed)
    return (
        rng.uniform(-2.0, 2.0, n_points),
        rng.uniform(-1.0, 1.0, n_points),
        rng.uniform(0.0, 100.0, n_waves),
        rng.uniform(0.0, 100.0, n_waves),
        rng.standard_normal((n_waves, n_states)),
    )


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    print(f"active backend: {_kernels.BACKEND}")
    if _fastwave is None:
        print("compiled kernel unavailable; benchmarking the NumPy path only")

    cases = [
        ("boundary pass", 6_000, 120, 1),
        ("quadrature grid", 60_000, 120, 12),
        ("large window", 120_000, 160, 40),
    ]
    header = f"{'case':>16} {'points':>8} {'waves':>6} {'states':>7} " \
             f"{'numpy [ms]':>11} {'cython [ms]':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, p, w, s in cases:
        x, y, kx, ky, coeffs = make_workload(p, w, s)
        t_ref = timeit(reference.states_on_points, x, y, kx, ky, True, False, coeffs)
        if _fastwave is not None:
            t_fast = timeit(_fastwave.states_on_points, x, y, kx, ky, True, False, coeffs)
            out_fast = _fastwave.states_on_points(x, y, kx, ky, True, False, coeffs)
            out_ref = reference.states_on_points(x, y, kx, ky, True, False, coeffs)
            assert np.allclose(out_fast, out_ref, atol=1e-10), "backends disagree"
            print(f"{name:>16} {p:>8} {w:>6} {s:>7} {1e3 * t_ref:>11.2f} "
                  f"{1e3 * t_fast:>12.2f} {t_ref / t_fast:>7.2f}x")
        else:
            print(f"{name:>16} {p:>8} {w:>6} {s:>7} {1e3 * t_ref:>11.2f} "
                  f"{'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
