"""Prony-based multi-user channel segmentation over the recovered field.

Runs the row/column Prony estimates on the first row and first column of the
PSIS-recovered object field, pairs the horizontal and vertical estimates by
amplitude proximity, and reconstructs each user's rank-1 channel vector.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .geometry import UpaGeometry
from .prony import PronyConfig, estimate

NMSE_FLOOR_DB = -300.0


class PairingError(ValueError):
    pass


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class PmcsConfig:
    """User count, per-axis estimation orders and pairing tolerance."""

    n_users: int
    est_order_h: int
    est_order_v: int
    root_tolerance: float = 1e-2
    solver: str = "pseudoinverse"
    pairing_tolerance: float = 10.0

    @classmethod
    def for_geometry(cls, geom: UpaGeometry, n_users: int,
                     est_order: int | None = None, **kwargs) -> "PmcsConfig":
        """Default orders: P_e = 10 where admissible, else clamped to K - N."""
        def clamp(k):
            pe = 10 if est_order is None else est_order
            return max(n_users, min(pe, k - n_users))
        return cls(n_users=n_users, est_order_h=clamp(geom.n_h),
                   est_order_v=clamp(geom.n_v), **kwargs)

    def validate(self, geom: UpaGeometry):
        n = self.n_users
        if not (n <= self.est_order_h <= geom.n_h - n):
            raise ValueError(
                f"est_order_h={self.est_order_h} violates N <= P_e <= K - N "
                f"for K={geom.n_h}, N={n}"
            )
        if not (n <= self.est_order_v <= geom.n_v - n):
            raise ValueError(
                f"est_order_v={self.est_order_v} violates N <= P_e <= K - N "
                f"for K={geom.n_v}, N={n}"
            )


@dataclass(frozen=True)
class UserEstimate:
    z_h: complex
    z_v: complex
    b: complex
    theta_deg: float
    phi_deg: float
    channel: np.ndarray


@dataclass(frozen=True)
class PmcsResult:
    per_user: tuple
    nmse_db: float = math.nan
    nmse_ratio: float = math.nan
    pairing: tuple = ()

    def to_json(self) -> str:
        def cplx(c):
            return [float(np.real(c)), float(np.imag(c))]
        payload = {
            "nmse_db": None if math.isnan(self.nmse_db) else self.nmse_db,
            "users": [
                {
                    "theta_deg": u.theta_deg,
                    "phi_deg": u.phi_deg,
                    "z_h": cplx(u.z_h),
                    "z_v": cplx(u.z_v),
                    "b": cplx(u.b),
                    "channel": [cplx(c) for c in u.channel],
                }
                for u in self.per_user
            ],
        }
        return json.dumps(payload, indent=2)


def extract_row_col_samples(e_o_hat: np.ndarray):
    """First-row (horizontal) and first-column (vertical) sample sequences."""
    grid = np.asarray(e_o_hat)
    if grid.size == 0:
        raise ValueError("empty field grid")
    return grid[0, :].copy(), grid[:, 0].copy()


def pair_estimates(b_h: np.ndarray, b_v: np.ndarray, tol: float = 10.0) -> tuple:
    """Assignment pi minimizing sum |b_h[i] - b_v[pi(i)]|.

    Exhaustive over permutations for N <= 8, greedy nearest-neighbour with
    validation beyond that. Raises PairingError on ambiguous or distant
    matches (the distinct-amplitude assumption is violated).
    """
    b_h = np.asarray(b_h)
    b_v = np.asarray(b_v)
    if b_h.shape != b_v.shape:
        raise ValueError("amplitude vectors must have the same length")
    n = b_h.size
    dist = np.abs(b_h[:, None] - b_v[None, :])

    if n <= 8:
        costs = sorted(
            (float(dist[np.arange(n), perm].sum()), perm)
            for perm in itertools.permutations(range(n))
        )
        best_cost, best = costs[0]
        if len(costs) > 1 and costs[1][0] - best_cost < 1e-9:
            raise PairingError(
                "ambiguous amplitude pairing: assignments "
                f"{best} and {costs[1][1]} have equal cost {best_cost:.3e}"
            )
        perm = best
    else:
        taken = set()
        perm = []
        for i in range(n):
            order = np.argsort(dist[i])
            j = next(int(j) for j in order if int(j) not in taken)
            taken.add(j)
            perm.append(j)
        perm = tuple(perm)

    scale = float(np.median(np.abs(np.concatenate([b_h, b_v]))))
    worst = float(dist[np.arange(n), list(perm)].max())
    if scale > 0 and worst > tol * scale:
        raise PairingError(
            f"best pairing has per-pair distance {worst:.3e} exceeding "
            f"{tol} * median amplitude {scale:.3e}; candidates: {perm}"
        )
    return tuple(perm)


def angles_from_poles(z_v: complex, z_h: complex, geom: UpaGeometry):
    """Elevation/azimuth (radians) from the spatial poles.

    Spacings above lambda0/2 alias and are rejected. The azimuth is the
    principal arcsin branch, i.e. the front half-space |phi| <= pi/2.
    """
    if geom.d_v > geom.lambda0 / 2 + 1e-12 or geom.d_h > geom.lambda0 / 2 + 1e-12:
        raise ValueError("spacing beyond lambda0/2 is spatially aliased; unsupported")
    cos_t = np.angle(z_v) * geom.lambda0 / (2 * np.pi * geom.d_v)
    cos_t = float(np.clip(cos_t, -1.0, 1.0))
    theta = math.acos(cos_t)
    sin_t = math.sin(theta)
    if sin_t < 1e-9:
        return theta, 0.0
    sin_p = np.angle(z_h) * geom.lambda0 / (2 * np.pi * geom.d_h) / sin_t
    phi = math.asin(float(np.clip(sin_p, -1.0, 1.0)))
    return theta, phi


def reconstruct_channel(z_h: complex, z_v: complex, b: complex,
                        geom: UpaGeometry) -> np.ndarray:
    """Rank-1 channel vector: entry (m, n) = b z_v^m z_h^n, array-flattened."""
    pv = z_v ** np.arange(geom.n_v)
    ph = z_h ** np.arange(geom.n_h)
    return (b * np.outer(pv, ph)).flatten(order="F")


def nmse(estimate_vec: np.ndarray, truth: np.ndarray) -> float:
    """10 log10(||e - t||^2 / ||t||^2), floored at -300 dB."""
    truth = np.asarray(truth)
    denom = float(np.linalg.norm(truth) ** 2)
    if denom == 0:
        raise ValueError("truth vector has zero norm")
    ratio = float(np.linalg.norm(np.asarray(estimate_vec) - truth) ** 2) / denom
    return ratio_to_db(ratio)


def ratio_to_db(ratio: float) -> float:
    if ratio <= 10 ** (NMSE_FLOOR_DB / 10):
        return NMSE_FLOOR_DB
    return 10.0 * math.log10(ratio)


def _match_truth(channels, true_channels):
    """Optimal assignment of estimated channels to ground-truth channels."""
    n = len(channels)
    cost = np.array([
        [float(np.linalg.norm(c - t) ** 2) for t in true_channels] for c in channels
    ])
    best, best_perm = None, None
    for perm in itertools.permutations(range(n)):
        c = cost[np.arange(n), perm].sum()
        if best is None or c < best:
            best, best_perm = c, perm
    return best_perm


def segment(e_o_hat: np.ndarray, cfg: PmcsConfig, geom: UpaGeometry,
            true_channels=None) -> PmcsResult:
    """Run the full segmentation over a recovered field grid.

    true_channels, when given, is a sequence of ground-truth channel vectors
    (length n_units); the reported NMSE is the summed-error ratio under the
    best estimate-to-truth assignment.
    """
    cfg.validate(geom)
    y_h, y_v = extract_row_col_samples(e_o_hat)

    est_h = estimate(y_h, PronyConfig(cfg.n_users, cfg.est_order_h,
                                      cfg.root_tolerance, cfg.solver))
    est_v = estimate(y_v, PronyConfig(cfg.n_users, cfg.est_order_v,
                                      cfg.root_tolerance, cfg.solver))
    if est_h.roots_signal.size < cfg.n_users or est_v.roots_signal.size < cfg.n_users:
        raise EstimationError("fewer signal roots than users")

    perm = pair_estimates(est_h.amplitudes, est_v.amplitudes, cfg.pairing_tolerance)

    users = []
    for i in range(cfg.n_users):
        z_h = complex(est_h.roots_signal[i])
        z_v = complex(est_v.roots_signal[perm[i]])
        b = (complex(est_h.amplitudes[i]) + complex(est_v.amplitudes[perm[i]])) / 2
        theta, phi = angles_from_poles(z_v, z_h, geom)
        users.append(UserEstimate(
            z_h=z_h, z_v=z_v, b=b,
            theta_deg=math.degrees(theta), phi_deg=math.degrees(phi),
            channel=reconstruct_channel(z_h, z_v, b, geom),
        ))

    if true_channels is not None:
        true_channels = [np.asarray(t) for t in true_channels]
        if len(true_channels) != cfg.n_users:
            raise ValueError("ground truth count does not match n_users")
        match = _match_truth([u.channel for u in users], true_channels)
        err = sum(
            float(np.linalg.norm(users[i].channel - true_channels[match[i]]) ** 2)
            for i in range(cfg.n_users)
        )
        denom = sum(float(np.linalg.norm(t) ** 2) for t in true_channels)
        ratio = err / denom
        return PmcsResult(per_user=tuple(users), nmse_db=ratio_to_db(ratio),
                          nmse_ratio=ratio, pairing=perm)

    return PmcsResult(per_user=tuple(users), pairing=perm)


def segment_ratio(e_o_hat, cfg, geom, true_channels) -> float:
    """Error-power ratio (before the log) for Monte-Carlo averaging."""
    return segment(e_o_hat, cfg, geom, true_channels=true_channels).nmse_ratio
