"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--n 256] [--repeat 20]

Each kernel is called once before timing so JIT compilation is excluded.
The outputs of both paths are compared as well, so a run doubles as a
consistency check.
"""

import argparse
import time

import numpy as np

from wavecrit import _kernels
from wavecrit.spectral import GridSpec


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256, help="grid points per axis (2D)")
    ap.add_argument("--K", type=int, default=2000, help="recursion length")
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()

    rotate_nb, gronwall_nb, power_nb = _kernels._jit_versions()
    rng = np.random.default_rng(0)
    grid = GridSpec(2, args.n)
    omega = grid.abs_xi_half()
    a = rng.standard_normal(omega.shape) + 1j * rng.standard_normal(omega.shape)
    b = rng.standard_normal(omega.shape) + 1j * rng.standard_normal(omega.shape)
    u = rng.standard_normal(grid.shape)
    w = rng.random(grid.shape)
    x = rng.random(args.K)
    tail = np.zeros(args.K)

    cases = [
        ("rotate_pair", lambda: _kernels.rotate_pair_numpy(a, b, omega, 0.37),
         lambda: rotate_nb(a, b, omega, 0.37)),
        ("gronwall_rhs", lambda: _kernels.gronwall_rhs_numpy(x, 1.0, 0.05, 1.3, 0.7, tail),
         lambda: gronwall_nb(x, 1.0, 0.05, 1.3, 0.7, tail)),
        ("weighted_power_sum", lambda: _kernels.weighted_power_sum_numpy(u, w, 4.0),
         lambda: power_nb(u, w, 4.0)),
    ]
    print(f"{'kernel':<20}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, f_np, f_nb in cases:
        t_np = best_of(f_np, args.repeat)
        t_nb = best_of(f_nb, args.repeat)
        r_np, r_nb = f_np(), f_nb()
        if isinstance(r_np, tuple):
            diff = max(float(np.max(np.abs(p - q))) for p, q in zip(r_np, r_nb))
        else:
            diff = float(np.max(np.abs(np.asarray(r_np) - np.asarray(r_nb))))
        print(f"{name:<20}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
