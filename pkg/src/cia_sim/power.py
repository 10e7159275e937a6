"""Interference-plus-noise covariance, whitening and water-filling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroEigenvalues, NotPositiveDefinite
from .signal_model import OfdmConfig, ReducedChannel, cp_insertion_matrix


@dataclass(frozen=True)
class NoiseModel:
    """Noise seen by the secondary receiver.

    When ``include_primary_interference`` is false the covariance is white;
    otherwise the primary OFDM signal (power ``p_primary`` per symbol)
    leaking through the primary-to-secondary channel is added.
    """

    noise_var: float
    include_primary_interference: bool = False
    p_primary: float = 1.0

    def __post_init__(self):
        if not self.noise_var > 0:
            raise ValueError("noise_var must be positive")


@dataclass(frozen=True, eq=False)
class PowerAllocation:
    """Per-stream powers and the water level that produced them."""

    p: np.ndarray
    mu: float
    budget: float

    @property
    def total(self) -> float:
        return float(np.sum(self.p))


def primary_transmit_covariance(cfg: OfdmConfig, p_primary: float) -> np.ndarray:
    """Covariance of ``x_p = A F^-1 s_p``, i.e. ``P_p A A^T`` (F is unitary)."""
    A = cp_insertion_matrix(cfg)
    return p_primary * (A @ A.T)


def interference_covariance(noise: NoiseModel, H_ps: ReducedChannel | None,
                            cfg: OfdmConfig) -> np.ndarray:
    N = cfg.n_subcarriers
    S = noise.noise_var * np.eye(N, dtype=complex)
    if not noise.include_primary_interference or noise.p_primary == 0:
        return S
    if H_ps is None:
        raise ValueError("primary interference requested without H_ps")
    Hps = H_ps.matrix
    S_p = primary_transmit_covariance(cfg, noise.p_primary)
    S = S + Hps @ S_p @ Hps.conj().T
    return 0.5 * (S + S.conj().T)


def whiten(S_eta: np.ndarray) -> np.ndarray:
    """Hermitian inverse square root ``S_eta^{-1/2}``."""
    w, U = np.linalg.eigh(0.5 * (S_eta + S_eta.conj().T))
    if w[0] <= 0:
        raise NotPositiveDefinite(f"minimum eigenvalue {w[0]:.3e} <= 0")
    return (U / np.sqrt(w)) @ U.conj().T


def is_white(S_eta: np.ndarray) -> bool:
    d = np.diag(S_eta)
    return bool(np.all(S_eta == np.diag(d)) and np.all(d == d[0]))


def whitened_channel(S_eta: np.ndarray, H: np.ndarray) -> np.ndarray:
    """``S_eta^{-1/2} H``, skipping the eigendecomposition for ``sigma^2 I``."""
    if is_white(S_eta):
        return H / np.sqrt(S_eta[0, 0].real)
    return whiten(S_eta) @ H


def waterfill(eigenvalues, budget: float) -> PowerAllocation:
    """Water-filling ``p_i = [mu - 1/lambda_i]^+`` with ``sum p_i = budget``.

    The active set is found by sorting the gains and shrinking it until the
    weakest active stream receives non-negative power. Zero gains never
    enter the active set. Powers are returned in the input order.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1:
        raise ValueError("eigenvalues must be a vector")
    if np.any(lam < 0):
        raise ValueError("eigenvalues must be non-negative")
    if budget < 0:
        raise ValueError("budget must be non-negative")
    p = np.zeros(lam.size)
    pos = np.flatnonzero(lam > 0)
    if pos.size == 0:
        if budget > 0:
            raise AllZeroEigenvalues("no stream has a positive gain")
        return PowerAllocation(p, float("inf"), float(budget))

    order = pos[np.argsort(-lam[pos], kind="stable")]
    inv = 1.0 / lam[order]
    csum = np.cumsum(inv)
    k = order.size
    while True:
        mu = (budget + csum[k - 1]) / k
        if mu - inv[k - 1] >= 0 or k == 1:
            break
        k -= 1
    p[order[:k]] = np.maximum(mu - inv[:k], 0.0)
    return PowerAllocation(p, float(mu), float(budget))


def stream_loading(G_eff: np.ndarray, budget: float) -> PowerAllocation:
    """Water-fill over the streams (columns) of an effective channel.

    The gain of stream ``i`` is ``||G_eff[:, i]||^2``; precoder columns are
    assumed unit-norm so that ``sum p_i`` is the transmitted power.
    """
    gains = np.einsum("ij,ij->j", G_eff.conj(), G_eff).real
    return waterfill(gains, budget)


def eigenmode_loading(E: np.ndarray, G_eff: np.ndarray, budget: float):
    """Transmit on the eigenmodes of ``G_eff = S^-1/2 H E`` at true power cost.

    Direction ``i`` is ``E w_i`` (``w_i`` the right singular vectors of
    ``G_eff``), rescaled to unit norm, so its gain becomes
    ``s_i^2 / ||E w_i||^2``. The transmit trace then equals ``sum p_i`` even
    when ``E`` is not semi-unitary.

    Returns
    -------
    (E_loaded, PowerAllocation)
        Unit-norm directions and the water-filled powers on them.
    """
    _, s, Wh = np.linalg.svd(G_eff, full_matrices=False)
    E_rot = E @ Wh.conj().T
    norms = np.sqrt(np.einsum("ij,ij->j", E_rot.conj(), E_rot).real)
    return E_rot / norms, waterfill(s ** 2 / norms ** 2, budget)
