import json
import math

import numpy as np
import pytest

from holosense import UpaGeometry, UserScenario
from holosense.channel import (
    composite_amplitude,
    received_field_grid,
    user_exponentials,
)
from holosense.pmcs import (
    PairingError,
    PmcsConfig,
    angles_from_poles,
    extract_row_col_samples,
    nmse,
    pair_estimates,
    ratio_to_db,
    reconstruct_channel,
    segment,
)


def test_extract_row_col(rng):
    grid = rng.normal(size=(6, 5)) + 1j * rng.normal(size=(6, 5))
    row, col = extract_row_col_samples(grid)
    np.testing.assert_array_equal(row, grid[0, :])
    np.testing.assert_array_equal(col, grid[:, 0])
    row[0] = 0  # copies, not views
    assert grid[0, 0] != 0


def test_pair_estimates_recovers_permutation(rng):
    b = np.array([1.0 + 0j, 0.5 - 0.5j, -0.8 + 0.1j])
    perm = (2, 0, 1)
    b_v = b[list(perm)]
    got = pair_estimates(b, b_v)
    # got[i] gives the index into b_v matching b[i]
    np.testing.assert_array_equal([b_v[j] for j in got], b)


def test_pair_estimates_ambiguous_raises():
    b_h = np.array([1.0 + 0j, -1.0 + 0j])
    b_v = np.array([0.0 + 1j, 0.0 - 1j])  # both assignments cost the same
    with pytest.raises(PairingError):
        pair_estimates(b_h, b_v)


def test_pair_estimates_distance_guard():
    b_h = np.array([1.0 + 0j, 2.0 + 0j])
    b_v = np.array([100.0 + 0j, 200.0 + 0j])
    with pytest.raises(PairingError):
        pair_estimates(b_h, b_v, tol=10.0)


def test_angles_from_poles_roundtrip(geom16):
    for theta_deg, phi_deg in [(90, 0), (70, 40), (110, -40), (30, 60), (45, -80)]:
        u = UserScenario.los(math.radians(theta_deg), math.radians(phi_deg))
        z_v, z_h = user_exponentials(geom16, u)
        theta, phi = angles_from_poles(z_v, z_h, geom16)
        assert math.degrees(theta) == pytest.approx(theta_deg, abs=1e-9)
        assert math.degrees(phi) == pytest.approx(phi_deg, abs=1e-9)


def test_angles_from_poles_rejects_aliased_spacing():
    lam = 299792458.0 / 3.5e9
    geom = UpaGeometry(8, 8, d_v=lam, d_h=lam, f_c=3.5e9)
    with pytest.raises(ValueError):
        angles_from_poles(1.0 + 0j, 1.0 + 0j, geom)


def test_reconstruct_channel_matches_received_field(geom16):
    u = UserScenario.los(math.radians(75), math.radians(25), beta=1.1 - 0.3j)
    b = composite_amplitude(geom16, u)
    z_v, z_h = user_exponentials(geom16, u)
    vec = reconstruct_channel(z_h, z_v, b, geom16)
    field = received_field_grid(geom16, [u]).flatten(order="F")
    np.testing.assert_allclose(vec, field, atol=1e-10)


def test_nmse_perfect_estimate_hits_floor():
    t = np.ones(8, complex)
    assert nmse(t, t) == -300.0


def test_nmse_zero_estimate_is_zero_db():
    t = np.ones(8, complex)
    assert nmse(np.zeros(8, complex), t) == pytest.approx(0.0, abs=1e-12)


def test_ratio_to_db_floor():
    assert ratio_to_db(0.0) == -300.0
    assert ratio_to_db(1e-31) == -300.0
    assert ratio_to_db(0.1) == pytest.approx(-10.0)


def test_segment_noiseless_two_users_exact(geom16):
    users = [
        UserScenario.los(math.radians(70), math.radians(40), beta=1.0 + 0j),
        UserScenario.los(math.radians(120), math.radians(-30),
                         beta=0.6 * np.exp(1j)),
    ]
    field = received_field_grid(geom16, users)
    truth = [
        received_field_grid(geom16, [u]).flatten(order="F") for u in users
    ]
    res = segment(field, PmcsConfig.for_geometry(geom16, 2), geom16,
                  true_channels=truth)
    assert res.nmse_db < -200
    got = sorted((round(u.theta_deg), round(u.phi_deg)) for u in res.per_user)
    assert got == [(70, 40), (120, -30)]


def test_segment_config_validation(geom16):
    field = received_field_grid(
        geom16, [UserScenario.los(math.radians(80), 0.0)])
    with pytest.raises(ValueError):
        segment(field, PmcsConfig(n_users=1, est_order_h=16, est_order_v=8),
                geom16)


def test_for_geometry_clamps_order():
    geom4 = UpaGeometry.half_wavelength(4, 4)
    cfg = PmcsConfig.for_geometry(geom4, 2)
    assert cfg.est_order_h == 2 and cfg.est_order_v == 2
    geom32 = UpaGeometry.half_wavelength(32, 32)
    cfg = PmcsConfig.for_geometry(geom32, 2)
    assert cfg.est_order_h == 10


def test_result_json_structure(geom16):
    users = [UserScenario.los(math.radians(70), math.radians(40))]
    field = received_field_grid(geom16, users)
    res = segment(field, PmcsConfig.for_geometry(geom16, 1), geom16)
    payload = json.loads(res.to_json())
    assert payload["nmse_db"] is None
    assert len(payload["users"]) == 1
    u = payload["users"][0]
    assert u["theta_deg"] == pytest.approx(70.0, abs=1e-6)
    assert len(u["channel"]) == 256
    assert all(len(c) == 2 for c in u["channel"])
