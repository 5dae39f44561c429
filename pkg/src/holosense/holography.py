"""Interferometric hologram recording and phase-shifting recovery.

Intensity-only detection of the superposed object + reference field, the
three-exposure phase-shifting scheme (shifts 0, pi/2, pi), exact recovery of
the complex object field, and the contaminated naive reconstruction weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import UpaGeometry
from .seeding import derive_seed

PSI_SHIFTS = (0.0, math.pi / 2, math.pi)


@dataclass(frozen=True)
class ReferenceWave:
    """Programmable plane reference wave generated by the surface."""

    amplitude: float = 1.0
    k_vec: tuple = (0.0, 0.0, 0.0)
    phase_shift: float = 0.0
    omega_r: float = 0.0

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("reference amplitude must be positive")
        object.__setattr__(self, "k_vec", tuple(float(v) for v in self.k_vec))

    def with_shift(self, shift: float) -> "ReferenceWave":
        return replace(self, phase_shift=shift)

    def field(self, geom: UpaGeometry) -> np.ndarray:
        """Reference field E_r over the surface, shape (n_v, n_h).

        Unit (m, n) sits at position (0, n*d_h, m*d_v); the default zero
        k_vec corresponds to a normal-incidence wave with uniform phase.
        """
        ky, kz = self.k_vec[1], self.k_vec[2]
        m = np.arange(geom.n_v)[:, None]
        n = np.arange(geom.n_h)[None, :]
        phase = ky * geom.d_h * n + kz * geom.d_v * m + self.phase_shift
        return self.amplitude * np.exp(1j * phase)


@dataclass(frozen=True)
class NoiseModel:
    """Complex-Gaussian perturbation of the object field, per unit per exposure."""

    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    def draw(self, shape, exposure_index: int = 0) -> np.ndarray:
        if self.sigma == 0:
            return np.zeros(shape, dtype=np.complex128)
        rng = np.random.default_rng(derive_seed(self.seed, exposure_index))
        scale = self.sigma / math.sqrt(2.0)
        return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    @classmethod
    def from_snr_db(cls, snr_db: float, signal_power: float, seed: int) -> "NoiseModel":
        """Noise level for a target SNR = signal_power / sigma^2."""
        return cls(sigma=math.sqrt(signal_power / 10 ** (snr_db / 10)), seed=seed)


@dataclass(frozen=True)
class Hologram:
    """Recorded intensity grid at a given reference phase shift."""

    intensity: np.ndarray
    phase_shift: float
    geom: UpaGeometry

    def to_csv(self, path):
        """One row per vertical index, comma-separated intensities."""
        np.savetxt(path, self.intensity, delimiter=",", fmt="%.12g")


@dataclass(frozen=True)
class HologramSet:
    """Three holograms of one object field at shifts 0, pi/2 and pi."""

    i0: Hologram
    i_half: Hologram
    i_pi: Hologram


def record(object_field: np.ndarray, ref: ReferenceWave, noise: NoiseModel,
           geom: UpaGeometry, exposure_index: int = 0) -> Hologram:
    """Record one hologram: |E_o + w + E_r|^2 per unit."""
    object_field = np.asarray(object_field, dtype=np.complex128)
    if object_field.shape != (geom.n_v, geom.n_h):
        raise ValueError(
            f"object field shape {object_field.shape} does not match "
            f"geometry ({geom.n_v}, {geom.n_h})"
        )
    e_r = ref.field(geom)
    w = noise.draw(object_field.shape, exposure_index)
    intensity = np.abs(object_field + w + e_r) ** 2
    return Hologram(intensity=intensity, phase_shift=ref.phase_shift, geom=geom)


def record_psi_set(object_field: np.ndarray, ref: ReferenceWave,
                   noise: NoiseModel, geom: UpaGeometry) -> HologramSet:
    """Three exposures of the same object field, noise independent per exposure."""
    holos = [
        record(object_field, ref.with_shift(ref.phase_shift + s), noise, geom, k)
        for k, s in enumerate(PSI_SHIFTS)
    ]
    return HologramSet(i0=holos[0], i_half=holos[1], i_pi=holos[2])


def psis_recover(holo_set: HologramSet, ref: ReferenceWave) -> np.ndarray:
    """Recover the complex object field from the three phase-shifted holograms.

    E_hat = (1 - j) / (4 E_r*) * { I(0) - I(pi/2) + j [I(pi/2) - I(pi)] }.
    Exact (to machine precision) in the noiseless case.
    """
    geom = holo_set.i0.geom
    e_r = ref.field(geom)
    if np.any(np.abs(e_r) == 0):
        raise ValueError("reference field is zero at some unit")
    i0 = holo_set.i0.intensity
    i1 = holo_set.i_half.intensity
    i2 = holo_set.i_pi.intensity
    return (1 - 1j) / (4 * np.conj(e_r)) * (i0 - i1 + 1j * (i1 - i2))


def naive_reconstruction_weights(holo: Hologram, ref: ReferenceWave) -> np.ndarray:
    """Contaminated emission coefficients E_r * I of the raw hologram."""
    return ref.field(holo.geom) * holo.intensity
