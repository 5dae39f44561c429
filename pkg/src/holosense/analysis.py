"""Error-bound evaluation and empirical verification utilities.

Evaluates the three estimation-error bounds (root perturbation, Vandermonde
pseudoinverse norm, amplitude error), runs the large-array NMSE trend
experiment, and provides a brute-force beamscan oracle for cross-checking
angle estimates.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import UserScenario, received_field_grid
from .geometry import UpaGeometry
from .holography import NoiseModel, ReferenceWave, psis_recover, record_psi_set
from .pmcs import PmcsConfig, ratio_to_db, reconstruct_channel, segment_ratio
from .prony import build_data_matrix, solve_min_norm, find_roots, select_signal_roots, fit_amplitudes
from .seeding import derive_seed


@dataclass(frozen=True)
class BoundInputs:
    """Instance quantities entering the root-perturbation bound."""

    epsilon: float
    delta: float
    K: int
    N: int
    P_e: int
    sigma1: float
    delta_sigma1_sq: float
    norm_Y1: float
    norm_y0: float
    norm_h: float
    beta0_abs: float
    q: float


def lemma1_bound(inputs: BoundInputs) -> float:
    """Upper bound on the root displacement |z_hat - z| for one signal root."""
    if inputs.beta0_abs <= 0:
        raise ValueError("coincident roots: beta0 must be nonzero")
    if inputs.sigma1 <= 0:
        raise ValueError("sigma1 must be positive")
    kn = inputs.K - inputs.N
    term = (
        inputs.norm_Y1 * math.sqrt(kn) * inputs.epsilon / inputs.sigma1 ** 2
        + inputs.norm_y0 * kn * inputs.epsilon
        + inputs.delta_sigma1_sq * inputs.norm_h
    )
    return math.sqrt(inputs.P_e) / inputs.beta0_abs * term


def measure_lemma1_instance(y_clean, y_noisy, n_signals, est_order,
                            true_roots) -> tuple:
    """Measured (error, bound) pair for one bounded-noise Prony instance.

    All bound quantities (singular values, norms, beta0) are taken from the
    concrete noiseless/noisy matrix pair; epsilon is the measured max sample
    perturbation.
    """
    y_clean = np.asarray(y_clean, dtype=np.complex128)
    y_noisy = np.asarray(y_noisy, dtype=np.complex128)
    k = y_clean.size
    eps = float(np.max(np.abs(y_noisy - y_clean)))

    Yc = build_data_matrix(y_clean, est_order)
    Yn = build_data_matrix(y_noisy, est_order)
    y0, Y1 = Yc[:, 0], Yc[:, 1:]
    s_clean = np.linalg.svd(Y1, compute_uv=False)
    s_noisy = np.linalg.svd(Yn[:, 1:], compute_uv=False)

    h = solve_min_norm(Yc, rank=n_signals)
    roots = find_roots(h)
    h_noisy = solve_min_norm(Yn, rank=n_signals)
    est_roots = select_signal_roots(find_roots(h_noisy), n_signals)

    true_roots = np.asarray(true_roots)
    err = 0.0
    bound = 0.0
    for zn in true_roots:
        others = roots[np.argsort(np.abs(roots - zn))[1:]]
        beta0 = float(np.abs(np.prod(zn - others)))
        inp = BoundInputs(
            epsilon=eps, delta=0.0, K=k, N=n_signals, P_e=est_order,
            sigma1=float(s_clean[0]),
            delta_sigma1_sq=float(abs(s_noisy[0] ** 2 - s_clean[0] ** 2)),
            norm_Y1=float(s_clean[0]), norm_y0=float(np.linalg.norm(y0)),
            norm_h=float(np.linalg.norm(h)), beta0_abs=beta0, q=0.0,
        )
        bound = max(bound, lemma1_bound(inp))
        err = max(err, float(np.min(np.abs(est_roots - zn))))
    return err, bound


def lemma2_check(z: np.ndarray, K: int) -> dict:
    """Explicit check of the Vandermonde pseudoinverse norm bound 3/K."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(np.abs(z) - 1.0) > 1e-9):
        raise ValueError("all poles must lie on the unit circle")
    omega = np.sort(np.mod(np.angle(z), 2 * np.pi))
    if omega.size > 1:
        gaps = np.diff(np.concatenate([omega, [omega[0] + 2 * np.pi]]))
        if gaps.min() <= 1e-12:
            raise ValueError("repeated poles")
        q = float(gaps.min())
    else:
        q = 2 * np.pi
    separation_ok = q > math.pi * math.sqrt(2 * K) / K

    phi = np.power.outer(z, np.arange(K)).T          # (K, N)
    gram = phi.conj().T @ phi
    L = np.linalg.solve(gram, phi.conj().T)
    norm_l_sq = float(np.linalg.norm(L, ord=2) ** 2)
    bound = 3.0 / K
    return {
        "q": q,
        "separation_ok": bool(separation_ok),
        "norm_L_sq": norm_l_sq,
        "bound": bound,
        "holds": bool(norm_l_sq <= bound),
    }


def lemma3_bound(inputs: BoundInputs, norm_y: float) -> float:
    """Upper bound on ||b_hat - b||_2 given frequency error delta and noise epsilon."""
    k = inputs.K
    return (
        math.sqrt(3.0) / k * (k - 0.5) ** 1.5 * math.sqrt(inputs.N)
        * inputs.delta * norm_y
        + math.sqrt(3.0) * inputs.epsilon
    )


def beamscan_oracle(e_o_hat: np.ndarray, geom: UpaGeometry,
                    grid_deg: float = 1.0,
                    theta_range=(0.0, 180.0), phi_range=(-90.0, 90.0)) -> list:
    """Brute-force angular power scan of the recovered field.

    Evaluates P(theta, phi) = |a(theta, phi)^H vec(E)|^2 / N_t^2 over the grid
    and returns the strict local maxima sorted by descending power as
    (theta_deg, phi_deg, power) tuples.
    """
    if grid_deg <= 0:
        raise ValueError("grid resolution must be positive")
    grid = np.asarray(e_o_hat, dtype=np.complex128)
    thetas = np.arange(theta_range[0], theta_range[1] + grid_deg / 2, grid_deg)
    phis = np.arange(phi_range[0], phi_range[1] + grid_deg / 2, grid_deg)
    power = _power_map(grid, geom, thetas, phis) / geom.n_units ** 2
    peaks = [
        (float(thetas[i]), float(phis[j]), float(power[i, j]))
        for i, j in _local_maxima(power)
    ]
    peaks.sort(key=lambda p: -p[2])
    return peaks


def _power_map(w_grid, geom, thetas_deg, phis_deg):
    """Correlation power over a theta x phi grid, shape (n_theta, n_phi)."""
    tt, pp = np.meshgrid(np.deg2rad(thetas_deg), np.deg2rad(phis_deg), indexing="ij")
    alpha = 2 * np.pi * geom.d_v * np.cos(tt) / geom.lambda0
    gamma = 2 * np.pi * geom.d_h * np.sin(tt) * np.sin(pp) / geom.lambda0
    p = kernels.angle_power(w_grid, alpha.ravel(), gamma.ravel())
    return p.reshape(tt.shape)


def _local_maxima(power: np.ndarray, floor: float = 0.0):
    """Indices of strict 8-neighbour local maxima above floor."""
    n_i, n_j = power.shape
    out = []
    for i in range(n_i):
        for j in range(n_j):
            v = power[i, j]
            if v <= floor:
                continue
            is_max = True
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if di == 0 and dj == 0:
                        continue
                    ii, jj = i + di, j + dj
                    if 0 <= ii < n_i and 0 <= jj < n_j and power[ii, jj] >= v:
                        is_max = False
                        break
                if not is_max:
                    break
            if is_max:
                out.append((i, j))
    return out


def nmse_trial(geom: UpaGeometry, scenarios, cfg: PmcsConfig,
               snr_db: float | None, seed: int) -> float:
    """One hologram -> PSIS -> PMCS trial; returns the NMSE power ratio."""
    field = received_field_grid(geom, scenarios)
    ref = ReferenceWave()
    if snr_db is None:
        noise = NoiseModel(sigma=0.0, seed=seed)
    else:
        power = float(np.mean(np.abs(field) ** 2))
        noise = NoiseModel.from_snr_db(snr_db, power, seed)
    holos = record_psi_set(field, ref, noise, geom)
    recovered = psis_recover(holos, ref)
    truth = [
        reconstruct_channel(
            z_h=np.exp(2j * np.pi * geom.d_h
                       * np.sin(u.paths[0].theta_zod) * np.sin(u.paths[0].phi_aod)
                       / geom.lambda0),
            z_v=np.exp(2j * np.pi * geom.d_v * np.cos(u.paths[0].theta_zod)
                       / geom.lambda0),
            b=_user_b(geom, u), geom=geom,
        )
        for u in scenarios
    ]
    return segment_ratio(recovered, cfg, geom, truth)


def _user_b(geom, user):
    from .channel import composite_amplitude
    return composite_amplitude(geom, user)


def mean_nmse_db(geom, scenarios, cfg, snr_db, trials: int, root_seed: int) -> float:
    """Sample mean of the error ratio over trials, reported in dB.

    Trials use independent derived seeds and a fixed summation order, so the
    result is deterministic and worker-count independent.
    """
    total = 0.0
    for trial in range(trials):
        total += nmse_trial(geom, scenarios, cfg, snr_db,
                            derive_seed(root_seed, trial))
    return ratio_to_db(total / trials)


def theorem1_trend(scenario_angles, snr_db, sizes, trials: int,
                   root_seed: int = 0, est_order: int | None = None) -> list:
    """Mean NMSE per array size for the asymptotic-trend experiment.

    scenario_angles: list of (theta_deg, phi_deg[, b]) per user. sizes are
    total unit counts of square arrays. Returns [(n_units, mean_nmse_db)].
    """
    results = []
    n_users = len(scenario_angles)
    for idx, n_t in enumerate(sizes):
        side = int(round(math.sqrt(n_t)))
        if side * side != n_t:
            raise ValueError(f"size {n_t} is not a perfect square")
        if side < 2 * n_users:
            warnings.warn(f"size {n_t} too small for N={n_users}; skipped")
            continue
        geom = UpaGeometry.half_wavelength(side, side)
        scenarios = [_scenario_from_entry(entry) for entry in scenario_angles]
        cfg = PmcsConfig.for_geometry(geom, n_users, est_order=est_order)
        results.append(
            (n_t, mean_nmse_db(geom, scenarios, cfg, snr_db, trials,
                               derive_seed(root_seed, idx)))
        )
    return results


def _scenario_from_entry(entry):
    theta_deg, phi_deg = entry[0], entry[1]
    beta = entry[2] if len(entry) > 2 else 1.0 + 0.0j
    return UserScenario.los(math.radians(theta_deg), math.radians(phi_deg), beta=beta)
