"""Radiation-pattern evaluation over an angular grid from per-unit weights."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .analysis import _local_maxima, _power_map
from .geometry import UpaGeometry, vec_to_grid

PEAK_FLOOR_DB = -40.0


@dataclass(frozen=True)
class AngularGrid:
    """Degree-stepped theta/phi evaluation grid.

    The default restricts azimuth to the front half-space [-90, 90] visible
    to the surface; directions behind the array plane are indistinguishable
    (phi and 180 - phi produce the same array response).
    """

    theta_range: tuple = (0.0, 180.0)
    phi_range: tuple = (-90.0, 90.0)
    step: float = 1.0

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        if not (0.0 <= self.theta_range[0] < self.theta_range[1] <= 180.0):
            raise ValueError("theta range must be increasing within [0, 180]")
        if not (-180.0 < self.phi_range[0] < self.phi_range[1] <= 180.0):
            raise ValueError("phi range must be increasing within (-180, 180]")
        if len(self.thetas) < 2 or len(self.phis) < 2:
            raise ValueError("step too coarse for the angular ranges")

    @property
    def thetas(self) -> np.ndarray:
        return np.arange(self.theta_range[0], self.theta_range[1] + self.step / 2,
                         self.step)

    @property
    def phis(self) -> np.ndarray:
        return np.arange(self.phi_range[0], self.phi_range[1] + self.step / 2,
                         self.step)


@dataclass(frozen=True)
class PatternResult:
    """Normalized gain map (max = 0 dB) and its local maxima."""

    grid: AngularGrid
    gain_db: np.ndarray
    peaks: tuple = field(default=())

    def to_csv(self, path):
        """Rows (theta_deg, phi_deg, gain_db), row-major grid scan."""
        thetas, phis = self.grid.thetas, self.grid.phis
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["theta_deg", "phi_deg", "gain_db"])
            for i, th in enumerate(thetas):
                for j, ph in enumerate(phis):
                    writer.writerow([f"{th:.12g}", f"{ph:.12g}",
                                     f"{self.gain_db[i, j]:.12g}"])


def array_pattern(weights: np.ndarray, geom: UpaGeometry,
                  grid: AngularGrid | None = None) -> PatternResult:
    """Normalized array-factor power pattern |a(theta, phi)^H w|^2 in dB.

    Peaks are strict 8-neighbour local maxima above the -40 dB floor, sorted
    by descending gain.
    """
    grid = grid or AngularGrid()
    w = np.asarray(weights, dtype=np.complex128).ravel()
    if w.size != geom.n_units:
        raise ValueError(f"weights length {w.size} != {geom.n_units} units")
    if not np.any(w):
        raise ValueError("all-zero weights")
    w_grid = vec_to_grid(w, geom)
    power = _power_map(w_grid, geom, grid.thetas, grid.phis)
    peak = power.max()
    with np.errstate(divide="ignore"):
        gain_db = 10.0 * np.log10(power / peak)
    floor_lin = peak * 10 ** (PEAK_FLOOR_DB / 10)
    peaks = [
        (float(grid.thetas[i]), float(grid.phis[j]), float(gain_db[i, j]))
        for i, j in _local_maxima(power, floor=floor_lin)
    ]
    peaks.sort(key=lambda p: -p[2])
    return PatternResult(grid=grid, gain_db=gain_db, peaks=tuple(peaks))
