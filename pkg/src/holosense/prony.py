"""Extended Prony engine for sums of undamped complex exponentials.

Builds the forward linear-prediction data matrix, solves for the minimum-norm
prediction coefficients (rank-truncated pseudoinverse or TLS), roots the
prediction polynomial, selects the signal roots, and fits complex amplitudes
by Vandermonde least squares.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DegenerateInputError(ValueError):
    pass


class IllConditionedError(ValueError):
    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


@dataclass(frozen=True)
class PronyConfig:
    """Estimation settings: signal count N, order P_e and solver choice."""

    n_signals: int
    est_order: int
    root_tolerance: float = 1e-2
    solver: str = "pseudoinverse"

    def __post_init__(self):
        if self.n_signals < 1:
            raise ValueError("n_signals must be >= 1")
        if self.est_order < self.n_signals:
            raise ValueError("est_order must be >= n_signals")
        if self.root_tolerance <= 0:
            raise ValueError("root_tolerance must be positive")
        if self.solver not in ("pseudoinverse", "total-least-squares"):
            raise ValueError(f"unknown solver {self.solver!r}")

    def validate_samples(self, n_samples: int):
        if self.est_order > n_samples - self.n_signals:
            raise ValueError(
                f"est_order {self.est_order} violates N <= P_e <= K - N "
                f"for K={n_samples}, N={self.n_signals}"
            )


@dataclass(frozen=True)
class PronyEstimate:
    """Prediction coefficients, root split and fitted amplitudes."""

    coeffs: np.ndarray
    roots_all: np.ndarray
    roots_signal: np.ndarray
    amplitudes: np.ndarray
    residual: float


def build_data_matrix(samples: np.ndarray, est_order: int) -> np.ndarray:
    """Forward prediction matrix, shape (K - P_e, P_e + 1).

    Row r is [y(P_e + r), y(P_e + r - 1), ..., y(r)].
    """
    y = np.asarray(samples, dtype=np.complex128).ravel()
    k = y.size
    if k < est_order + 1:
        raise ValueError(f"need at least P_e + 1 = {est_order + 1} samples, got {k}")
    rows = k - est_order
    idx = est_order + np.arange(rows)[:, None] - np.arange(est_order + 1)[None, :]
    return y[idx]


def solve_min_norm(Y: np.ndarray, rank: int | None = None,
                   solver: str = "pseudoinverse") -> np.ndarray:
    """Minimum-norm prediction coefficients h with h[0] = 1 and Y h ~ 0.

    rank: truncation rank for the SVD (the known signal count when noise is
    present); None keeps the full numerical rank.
    """
    Y = np.asarray(Y, dtype=np.complex128)
    if not np.any(Y):
        raise DegenerateInputError("all-zero data matrix")

    if solver == "total-least-squares":
        return _solve_tls(Y, rank)

    y0 = Y[:, 0]
    Y1 = Y[:, 1:]
    u, s, vh = np.linalg.svd(Y1, full_matrices=False)
    tol = max(Y1.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    eff = int(np.sum(s > tol))
    r = eff if rank is None else min(rank, eff)
    if r == 0:
        raise DegenerateInputError("zero-rank prediction matrix")
    h_rest = -(vh[:r].conj().T @ ((u[:, :r].conj().T @ y0) / s[:r]))
    return np.concatenate([[1.0 + 0.0j], h_rest])


def _solve_tls(Y: np.ndarray, rank: int | None) -> np.ndarray:
    """Total-least-squares flavored min-norm solve.

    Projects the unit vector e_0 onto the (numerical) null space of the full
    data matrix and rescales so the leading coefficient is 1.
    """
    _, s, vh = np.linalg.svd(Y, full_matrices=True)
    tol = max(Y.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    eff = int(np.sum(s > tol))
    r = eff if rank is None else min(rank, eff)
    v_null = vh[r:].conj().T                     # (P_e + 1, null dim)
    if v_null.shape[1] == 0:
        raise DegenerateInputError("data matrix has full rank, no null space")
    h = v_null @ v_null.conj().T[:, 0]
    if abs(h[0]) < 1e-14:
        raise DegenerateInputError("null space orthogonal to the monic constraint")
    return h / h[0]


def find_roots(coeffs: np.ndarray) -> np.ndarray:
    """All P_e roots of the monic prediction polynomial sum h_n z^(P_e - n)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if abs(coeffs[0] - 1.0) > 1e-9:
        raise ValueError("coefficient vector must be monic (coeffs[0] = 1)")
    roots = np.roots(coeffs)
    # np.roots drops exact trailing-zero coefficients; restore zero roots
    deficit = coeffs.size - 1 - roots.size
    if deficit > 0:
        roots = np.concatenate([roots, np.zeros(deficit, dtype=np.complex128)])
    return roots


def select_signal_roots(roots: np.ndarray, n_signals: int,
                        tol: float = 1e-2) -> np.ndarray:
    """The n_signals roots of largest modulus (deterministic tie ordering).

    In the noiseless undamped case these are exactly the unit-circle roots;
    tol is retained for callers that want to validate the selection.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.size < n_signals:
        raise ValueError(f"need at least {n_signals} roots, got {roots.size}")
    order = np.lexsort((np.angle(roots), -np.abs(roots)))
    return roots[order[:n_signals]]


def fit_amplitudes(samples: np.ndarray, roots_signal: np.ndarray) -> np.ndarray:
    """Least-squares amplitudes b of y(k) = sum b_n z_n^k over k = 0..K-1."""
    y = np.asarray(samples, dtype=np.complex128).ravel()
    z = np.asarray(roots_signal, dtype=np.complex128).ravel()
    if y.size < z.size:
        raise ValueError("need at least as many samples as roots")
    if z.size > 1:
        diff = np.abs(z[:, None] - z[None, :])
        np.fill_diagonal(diff, np.inf)
        if diff.min() <= 1e-9:
            phi = np.power.outer(z, np.arange(y.size)).T
            raise IllConditionedError(
                "repeated signal roots make the Vandermonde system singular",
                condition_number=np.linalg.cond(phi),
            )
    phi = np.power.outer(z, np.arange(y.size)).T     # (K, N)
    b, *_ = np.linalg.lstsq(phi, y, rcond=None)
    return b


def estimate(samples: np.ndarray, cfg: PronyConfig) -> PronyEstimate:
    """Full chain: data matrix -> coefficients -> roots -> amplitudes."""
    y = np.asarray(samples, dtype=np.complex128).ravel()
    cfg.validate_samples(y.size)
    Y = build_data_matrix(y, cfg.est_order)
    h = solve_min_norm(Y, rank=cfg.n_signals, solver=cfg.solver)
    roots = find_roots(h)
    signal = select_signal_roots(roots, cfg.n_signals, cfg.root_tolerance)
    b = fit_amplitudes(y, signal)
    phi = np.power.outer(signal, np.arange(y.size)).T
    residual = float(np.linalg.norm(phi @ b - y))
    return PronyEstimate(coeffs=h, roots_all=roots, roots_signal=signal,
                         amplitudes=b, residual=residual)
