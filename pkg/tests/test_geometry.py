import math

import numpy as np
import pytest

from holosense import UpaGeometry
from holosense.geometry import (
    grid_to_vec,
    steering_horizontal,
    steering_vector,
    steering_vertical,
    vec_to_grid,
)

C_LIGHT = 299792458.0


def test_half_wavelength_spacing():
    geom = UpaGeometry.half_wavelength(16, 16, f_c=3.5e9)
    lam = C_LIGHT / 3.5e9
    assert geom.lambda0 == pytest.approx(lam, rel=1e-12)
    assert geom.d_v == pytest.approx(lam / 2)
    assert geom.d_h == pytest.approx(lam / 2)
    assert geom.n_units == 256


def test_invalid_dimensions_rejected():
    with pytest.raises(ValueError):
        UpaGeometry(0, 4, 0.04, 0.04, 3.5e9)
    with pytest.raises(ValueError):
        UpaGeometry(4, 4, -0.01, 0.04, 3.5e9)


def test_steering_elements_match_scalar_formula(geom16):
    # Per-element oracle: recompute each phasor directly from the geometry.
    theta, phi = math.radians(70.0), math.radians(40.0)
    a_v = steering_vertical(geom16, theta)
    a_h = steering_horizontal(geom16, theta, phi)
    lam = geom16.lambda0
    for m in range(geom16.n_v):
        expect = np.exp(2j * np.pi * m * geom16.d_v * math.cos(theta) / lam)
        assert a_v[m] == pytest.approx(expect, abs=1e-12)
    for n in range(geom16.n_h):
        expect = np.exp(2j * np.pi * n * geom16.d_h
                        * math.sin(theta) * math.sin(phi) / lam)
        assert a_h[n] == pytest.approx(expect, abs=1e-12)


def test_steering_vector_is_kron_and_unit_modulus(geom16):
    theta, phi = math.radians(110.0), math.radians(-25.0)
    a = steering_vector(geom16, theta, phi)
    a_v = steering_vertical(geom16, theta)
    a_h = steering_horizontal(geom16, theta, phi)
    np.testing.assert_allclose(a, np.kron(a_h, a_v), atol=1e-12)
    np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)


def test_flat_index_is_column_major(geom16):
    # Flat index n * n_v + m: the (m, n) grid entry lands at that position.
    grid = np.arange(256, dtype=complex).reshape(16, 16)
    vec = grid_to_vec(grid)
    for m, n in [(0, 0), (3, 7), (15, 15), (1, 0), (0, 1)]:
        assert vec[n * 16 + m] == grid[m, n]


def test_grid_vec_roundtrip(geom16, rng):
    grid = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    back = vec_to_grid(grid_to_vec(grid), geom16)
    np.testing.assert_array_equal(back, grid)


def test_broadside_steering_is_uniform(geom16):
    # theta = 90 deg, phi = 0: both phase increments vanish.
    a = steering_vector(geom16, math.pi / 2, 0.0)
    np.testing.assert_allclose(a, np.ones(256), atol=1e-12)
