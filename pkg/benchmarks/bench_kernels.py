"""Compare the compiled kernel backend against the NumPy reference.

Usage:  python benchmarks/bench_kernels.py [--repeat N]

Times the three hot kernels on workloads shaped like the real callers
(oracle time grids, spectral-function estimation, mean-field phase sums)
and prints a table with the speedup of the compiled extension.
"""

import argparse
import time

import numpy as np

from dephaselab._kernels import _numpy as ref

try:
    from dephaselab._kernels import _core as compiled
except ImportError:
    compiled = None


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="repetitions per measurement (best is kept)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    workloads = [
        ("discrete_gamma (K=512, 2000 times)",
         "discrete_gamma",
         (rng.uniform(0.0, 1.0, 512), np.sort(rng.uniform(0.01, 5.0, 512)),
          np.linspace(0.0, 100.0, 2000))),
        ("gaussian_kernel_sum (4e4 pairs, 81 grid)",
         "gaussian_kernel_sum",
         (rng.normal(0.0, 2.0, 40000), rng.uniform(0.0, 1.0, 40000),
          np.linspace(0.0, 2.0, 81), 0.05)),
        ("weighted_phase_sum (4096 phases, 200 times)",
         "weighted_phase_sum",
         (rng.normal(0.0, 1.0, 4096), rng.uniform(0.0, 1.0, 4096),
          np.geomspace(0.1, 1000.0, 200))),
    ]

    print(f"{'workload':48s} {'numpy':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, name, payload in workloads:
        t_ref = _time(getattr(ref, name), payload, args.repeat)
        if compiled is None:
            print(f"{label:48s} {t_ref * 1e3:8.2f}ms {'n/a':>10s} {'n/a':>8s}")
            continue
        t_c = _time(getattr(compiled, name), payload, args.repeat)
        a = np.asarray(getattr(ref, name)(*payload))
        b = np.asarray(getattr(compiled, name)(*payload))
        assert np.allclose(a, b, rtol=1e-10, atol=1e-12), label
        print(f"{label:48s} {t_ref * 1e3:8.2f}ms {t_c * 1e3:8.2f}ms"
              f" {t_ref / t_c:7.1f}x")
    if compiled is None:
        print("\ncompiled extension not built; only the NumPy backend timed")


if __name__ == "__main__":
    main()
