"""Multipath UPA channel synthesis and the spatially sampled received field."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .geometry import UpaGeometry, steering_vector


@dataclass(frozen=True)
class PathParams:
    """Angles, delay and complex gain of a single propagation path."""

    theta_zod: float
    phi_aod: float
    theta_zoa: float
    phi_aoa: float
    beta: complex
    tau: float = 0.0

    def __post_init__(self):
        for name, ang, lo, hi in (
            ("theta_zod", self.theta_zod, 0.0, math.pi),
            ("theta_zoa", self.theta_zoa, 0.0, math.pi),
        ):
            if not (lo <= ang <= hi):
                raise ValueError(f"{name}={ang} outside [0, pi]")
        for name, ang in (("phi_aod", self.phi_aod), ("phi_aoa", self.phi_aoa)):
            if not (-math.pi < ang <= math.pi + 1e-12):
                raise ValueError(f"{name}={ang} outside (-pi, pi]")
        if not np.isfinite(self.beta) or self.beta == 0:
            raise ValueError("beta must be finite and nonzero")

    def arrival_unit_vector(self) -> np.ndarray:
        """Spherical unit vector of the arrival direction.

        The third component uses the departure elevation, matching the source
        model; it only contributes a constant phase to the composite gain.
        """
        return np.array(
            [
                math.sin(self.theta_zoa) * math.cos(self.phi_aoa),
                math.sin(self.theta_zoa) * math.sin(self.phi_aoa),
                math.cos(self.theta_zod),
            ]
        )


@dataclass(frozen=True)
class UserScenario:
    """Per-user multipath set, position, motion and transmitted symbol."""

    paths: tuple
    rx_location: tuple = (0.0, 0.0, 0.0)
    speed: float = 0.0
    theta_v: float = 0.0
    phi_v: float = 0.0
    tx_symbol: complex = 1.0 + 0.0j

    def __post_init__(self):
        if len(self.paths) == 0:
            raise ValueError("scenario needs at least one path")
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(self, "rx_location", tuple(float(v) for v in self.rx_location))

    @classmethod
    def los(cls, theta: float, phi: float, beta: complex = 1.0 + 0.0j,
            tau: float = 0.0, **kwargs) -> "UserScenario":
        """Single line-of-sight path with coincident departure/arrival angles."""
        path = PathParams(theta_zod=theta, phi_aod=phi, theta_zoa=theta,
                          phi_aoa=phi, beta=beta, tau=tau)
        return cls(paths=(path,), **kwargs)

    def velocity_vector(self) -> np.ndarray:
        return self.speed * np.array(
            [
                math.sin(self.theta_v) * math.cos(self.phi_v),
                math.sin(self.theta_v) * math.sin(self.phi_v),
                math.cos(self.theta_v),
            ]
        )

    def doppler(self, path: PathParams, lambda0: float) -> float:
        """Angular Doppler shift of one path, r_hat . v / lambda0."""
        return float(path.arrival_unit_vector() @ self.velocity_vector()) / lambda0


@dataclass(frozen=True)
class SubcarrierGrid:
    """Uniformly spaced subcarrier frequencies."""

    n_f: int
    delta_f: float
    f1: float
    f: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_f < 1:
            raise ValueError("n_f must be >= 1")
        freqs = self.f1 + self.delta_f * np.arange(self.n_f)
        object.__setattr__(self, "f", freqs)

    @classmethod
    def single(cls, f_c: float) -> "SubcarrierGrid":
        return cls(n_f=1, delta_f=0.0, f1=f_c)


def path_gain(user: UserScenario, path: PathParams, geom: UpaGeometry, t: float) -> complex:
    """Diagonal entry c_{u,p}(t): gain, location phase and Doppler phasor."""
    r_hat = path.arrival_unit_vector()
    loc_phase = 2.0 * np.pi * float(r_hat @ np.asarray(user.rx_location)) / geom.lambda0
    omega = user.doppler(path, geom.lambda0)
    return path.beta * np.exp(1j * loc_phase) * np.exp(1j * omega * t)


def channel_matrix(geom: UpaGeometry, user: UserScenario,
                   grid: SubcarrierGrid, t: float = 0.0) -> np.ndarray:
    """Channel H_u(t) = A C_u(t) B of shape (n_units, n_f)."""
    paths = user.paths
    A = np.column_stack([steering_vector(geom, p.theta_zod, p.phi_aod) for p in paths])
    C = np.diag([path_gain(user, p, geom, t) for p in paths])
    B = np.array([np.exp(-2j * np.pi * grid.f * p.tau) for p in paths])
    return A @ C @ B


def composite_amplitude(geom: UpaGeometry, user: UserScenario, t: float = 0.0) -> complex:
    """Composite LOS coefficient b_u = x_u c_u(t) exp(-j 2 pi f_c tau)."""
    if len(user.paths) != 1:
        raise ValueError("composite amplitude is defined for LOS scenarios only")
    path = user.paths[0]
    return (
        user.tx_symbol
        * path_gain(user, path, geom, t)
        * np.exp(-2j * np.pi * geom.f_c * path.tau)
    )


def user_exponentials(geom: UpaGeometry, user: UserScenario):
    """Spatial poles (z_v, z_h) of a LOS user on this geometry."""
    path = user.paths[0]
    z_v = np.exp(2j * np.pi * geom.d_v * np.cos(path.theta_zod) / geom.lambda0)
    z_h = np.exp(
        2j * np.pi * geom.d_h * np.sin(path.theta_zod) * np.sin(path.phi_aod)
        / geom.lambda0
    )
    return z_v, z_h


def received_field_grid(geom: UpaGeometry, scenarios, t: float = 0.0) -> np.ndarray:
    """Object field y(m, n) on the surface: superposition of all LOS users."""
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("at least one user scenario required")
    b = np.empty(len(scenarios), dtype=np.complex128)
    z_v = np.empty(len(scenarios), dtype=np.complex128)
    z_h = np.empty(len(scenarios), dtype=np.complex128)
    for i, user in enumerate(scenarios):
        if len(user.paths) != 1:
            raise ValueError("received_field expects LOS (single-path) scenarios")
        b[i] = composite_amplitude(geom, user, t)
        z_v[i], z_h[i] = user_exponentials(geom, user)
    return kernels.multiuser_field(b, z_v, z_h, geom.n_v, geom.n_h)


def received_field(geom: UpaGeometry, scenarios, t: float = 0.0) -> np.ndarray:
    """Received object field flattened to length n_units in array order."""
    return received_field_grid(geom, scenarios, t).flatten(order="F")
