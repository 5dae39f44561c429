"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The jitted path is used by default; set HOLOSENSE_NUMBA=0 to force the numpy
fallback (or when numba is unavailable). Both paths are kept callable so the
benchmark can compare them directly.
"""
from __future__ import annotations

import os

import numpy as np

_want_numba = os.environ.get("HOLOSENSE_NUMBA", "1") != "0"

try:
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def deco(func):
            return func
        return deco

    prange = range

USE_NUMBA = _want_numba and NUMBA_AVAILABLE


# ---------------------------------------------------------------------------
# Multi-user plane-wave field synthesis: grid[m, n] = sum_u b_u zv_u^m zh_u^n
# ---------------------------------------------------------------------------

def _multiuser_field_numpy(b, z_v, z_h, n_v, n_h):
    m = np.arange(n_v)[:, None]
    n = np.arange(n_h)[:, None]
    pow_v = z_v[None, :] ** m            # (n_v, N)
    pow_h = z_h[None, :] ** n            # (n_h, N)
    return np.einsum("u,mu,nu->mn", b, pow_v, pow_h)


@njit(cache=True)
def _multiuser_field_numba(b, z_v, z_h, n_v, n_h):  # pragma: no cover - jitted
    out = np.zeros((n_v, n_h), dtype=np.complex128)
    for u in range(b.shape[0]):
        zv_m = 1.0 + 0.0j
        for m in range(n_v):
            zh_n = b[u] * zv_m
            for n in range(n_h):
                out[m, n] += zh_n
                zh_n *= z_h[u]
            zv_m *= z_v[u]
    return out


def multiuser_field(b, z_v, z_h, n_v, n_h):
    """Superposed field of undamped exponentials over an n_v x n_h grid."""
    b = np.ascontiguousarray(b, dtype=np.complex128)
    z_v = np.ascontiguousarray(z_v, dtype=np.complex128)
    z_h = np.ascontiguousarray(z_h, dtype=np.complex128)
    if USE_NUMBA:
        return _multiuser_field_numba(b, z_v, z_h, n_v, n_h)
    return _multiuser_field_numpy(b, z_v, z_h, n_v, n_h)


# ---------------------------------------------------------------------------
# Angular-grid correlation power: p(i) = |sum_{m,n} conj(a_i[m,n]) w[m,n]|^2
# with a_i[m, n] = exp(j (alpha_i m + gamma_i n)).
# ---------------------------------------------------------------------------

def _angle_power_numpy(w_grid, alpha, gamma):
    n_v, n_h = w_grid.shape
    m = np.arange(n_v)
    n = np.arange(n_h)
    ev = np.exp(-1j * np.outer(alpha, m))        # (n_angles, n_v)
    eh = np.exp(-1j * np.outer(gamma, n))        # (n_angles, n_h)
    t = ev @ w_grid                              # (n_angles, n_h)
    s = np.einsum("an,an->a", t, eh)
    return np.abs(s) ** 2


@njit(cache=True, parallel=True)
def _angle_power_numba(w_grid, alpha, gamma):  # pragma: no cover - jitted
    n_v, n_h = w_grid.shape
    out = np.empty(alpha.shape[0], dtype=np.float64)
    for i in prange(alpha.shape[0]):
        ea = np.exp(-1j * alpha[i])
        eg = np.exp(-1j * gamma[i])
        acc = 0.0 + 0.0j
        pv = 1.0 + 0.0j
        for m in range(n_v):
            row = 0.0 + 0.0j
            ph = 1.0 + 0.0j
            for n in range(n_h):
                row += w_grid[m, n] * ph
                ph *= eg
            acc += row * pv
            pv *= ea
        out[i] = acc.real * acc.real + acc.imag * acc.imag
    return out


def angle_power(w_grid, alpha, gamma):
    """Correlation power of weights against steering phasors per angle.

    alpha/gamma are the per-angle vertical/horizontal phase increments
    (2 pi d cos(theta) / lambda0 etc.) flattened over the angular grid.
    """
    w_grid = np.ascontiguousarray(w_grid, dtype=np.complex128)
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    gamma = np.ascontiguousarray(gamma, dtype=np.float64)
    if USE_NUMBA:
        return _angle_power_numba(w_grid, alpha, gamma)
    return _angle_power_numpy(w_grid, alpha, gamma)


def warmup():
    """Trigger jit compilation of all kernels on tiny inputs."""
    b = np.ones(1, dtype=np.complex128)
    z = np.ones(1, dtype=np.complex128)
    multiuser_field(b, z, z, 2, 2)
    angle_power(np.ones((2, 2), dtype=np.complex128), np.zeros(2), np.zeros(2))
