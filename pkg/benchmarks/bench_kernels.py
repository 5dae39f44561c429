"""Timing comparison of the numba-jitted kernels against the numpy fallback.

Run with: python benchmarks/bench_kernels.py
"""
import time

import numpy as np

from holosense import kernels


def bench(fn, *args, repeat=5):
    fn(*args)  # warm (jit compile / cache load)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    rows = []

    for n_users, side in [(2, 16), (8, 64), (16, 256)]:
        b = rng.normal(size=n_users) + 1j * rng.normal(size=n_users)
        z_v = np.exp(1j * rng.uniform(-np.pi, np.pi, n_users))
        z_h = np.exp(1j * rng.uniform(-np.pi, np.pi, n_users))
        t_np = bench(kernels._multiuser_field_numpy, b, z_v, z_h, side, side)
        label = f"field {n_users} users on {side}x{side}"
        if kernels.NUMBA_AVAILABLE:
            t_nb = bench(kernels._multiuser_field_numba, b, z_v, z_h, side, side)
            rows.append((label, t_np, t_nb))
        else:
            rows.append((label, t_np, None))

    for side, n_angles in [(16, 181 * 181), (64, 181 * 181)]:
        w = rng.normal(size=(side, side)) + 1j * rng.normal(size=(side, side))
        alpha = rng.uniform(-np.pi, np.pi, n_angles)
        gamma = rng.uniform(-np.pi, np.pi, n_angles)
        t_np = bench(kernels._angle_power_numpy, w, alpha, gamma)
        label = f"angle power {side}x{side}, {n_angles} angles"
        if kernels.NUMBA_AVAILABLE:
            t_nb = bench(kernels._angle_power_numba, w, alpha, gamma)
            rows.append((label, t_np, t_nb))
        else:
            rows.append((label, t_np, None))

    print(f"{'kernel':<40} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for label, t_np, t_nb in rows:
        if t_nb is None:
            print(f"{label:<40} {t_np * 1e3:>8.2f}ms {'n/a':>10} {'n/a':>8}")
        else:
            print(f"{label:<40} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms "
                  f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
