"""Compare the numba and pure-numpy backends on the hot kernels.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import timeit

import numpy as np

from projangles import _accel
from projangles.oppenheim import unit_directions


def cases(rng):
    n = 4
    contraction = rng.standard_normal((n, n))
    contraction *= 0.95 / np.max(np.abs(np.linalg.eigvals(contraction)))
    dirs = unit_directions(n)
    mixed = rng.standard_normal((n, n))
    x0 = rng.standard_normal(n)
    return {
        "power_iterate": lambda b: _accel.power_iterate(contraction, 100000, 1e-14, 1e12, backend=b),
        "norm_ratios": lambda b: _accel.norm_ratios(mixed, dirs, _accel.NORM_MIXED, backend=b),
        "refine_norm_ratio": lambda b: _accel.refine_norm_ratio(mixed, x0, _accel.NORM_MIXED, backend=b),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend is available")
        return
    _accel.warmup()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>10}")
    for name, fn in cases(rng).items():
        times = {}
        for backend in ("numpy", "numba"):
            fn(backend)
            times[backend] = min(timeit.repeat(lambda: fn(backend), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20}{times['numpy']:>12.3f}{times['numba']:>12.3f}{times['numpy'] / times['numba']:>9.1f}x")


if __name__ == "__main__":
    main()
