"""Uniform planar array geometry and steering vectors.

The surface lies in the zoy plane with the x axis as its normal. Unit
indexing starts at the lower-left unit and increases along the vertical (z)
axis up to the top row, then advances one column, i.e. flat index
``n * n_v + m`` for vertical index m and horizontal index n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class UpaGeometry:
    """Array dimensions, unit spacing and carrier frequency."""

    n_v: int
    n_h: int
    d_v: float
    d_h: float
    f_c: float
    lambda0: float = field(init=False)

    def __post_init__(self):
        if self.n_v < 1 or self.n_h < 1:
            raise ValueError("array dimensions must be >= 1")
        if self.d_v <= 0 or self.d_h <= 0:
            raise ValueError("unit spacing must be positive")
        if self.f_c <= 0:
            raise ValueError("carrier frequency must be positive")
        object.__setattr__(self, "lambda0", SPEED_OF_LIGHT / self.f_c)

    @property
    def n_units(self) -> int:
        return self.n_v * self.n_h

    @classmethod
    def half_wavelength(cls, n_v: int, n_h: int, f_c: float = 3.5e9) -> "UpaGeometry":
        """Square-spaced array with d = lambda0 / 2 (the default 16x16 setup)."""
        lam = SPEED_OF_LIGHT / f_c
        return cls(n_v=n_v, n_h=n_h, d_v=lam / 2, d_h=lam / 2, f_c=f_c)


def _check_angles(theta: float, phi: float):
    if not (0.0 <= theta <= math.pi):
        raise ValueError(f"theta={theta} outside [0, pi]")
    if not (-math.pi < phi <= math.pi + 1e-12):
        raise ValueError(f"phi={phi} outside (-pi, pi]")


def steering_vertical(geom: UpaGeometry, theta: float) -> np.ndarray:
    """Vertical factor a_v: unit phasors exp(j 2 pi k d_v cos(theta) / lambda0)."""
    k = np.arange(geom.n_v)
    return np.exp(2j * np.pi * k * geom.d_v * np.cos(theta) / geom.lambda0)


def steering_horizontal(geom: UpaGeometry, theta: float, phi: float) -> np.ndarray:
    """Horizontal factor a_h: exp(j 2 pi k d_h sin(theta) sin(phi) / lambda0)."""
    k = np.arange(geom.n_h)
    return np.exp(
        2j * np.pi * k * geom.d_h * np.sin(theta) * np.sin(phi) / geom.lambda0
    )


def steering_vector(geom: UpaGeometry, theta: float, phi: float) -> np.ndarray:
    """3-D steering vector a(theta, phi) = a_h kron a_v, length n_v * n_h.

    theta is the elevation (zenith) angle in [0, pi], phi the azimuth in
    (-pi, pi]. The Kronecker ordering matches the column-major unit indexing.
    """
    _check_angles(theta, phi)
    return np.kron(steering_horizontal(geom, theta, phi), steering_vertical(geom, theta))


def grid_to_vec(grid: np.ndarray) -> np.ndarray:
    """Flatten an (n_v, n_h) per-unit grid in the array indexing order."""
    return np.asarray(grid).flatten(order="F")


def vec_to_grid(vec: np.ndarray, geom: UpaGeometry) -> np.ndarray:
    """Inverse of grid_to_vec."""
    return np.asarray(vec).reshape((geom.n_v, geom.n_h), order="F")
