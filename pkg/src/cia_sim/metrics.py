"""Spectral efficiency and interference leakage."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .power import PowerAllocation, whitened_channel
from .precoders import Precoder
from .signal_model import (OfdmConfig, ReducedChannel, cp_insertion_matrix,
                           cp_removal_matrix, dft_matrix)


def _as_matrix(E) -> np.ndarray:
    return E.E if isinstance(E, Precoder) else np.asarray(E)


def _as_powers(P) -> np.ndarray:
    return P.p if isinstance(P, PowerAllocation) else np.asarray(P, dtype=float)


def secondary_spectral_efficiency(H_ss: ReducedChannel, E, P, S_eta: np.ndarray) -> float:
    """Secondary-link rate in bit/s/Hz, normalized by the block length N+L.

    Evaluates ``log2 det(I_N + S^-1/2 H E P E^H H^H S^-1/2) / (N+L)`` through
    the ``L x L`` determinant ``det(I_L + P^1/2 G^H G P^1/2)``, which is the
    same value by Sylvester's identity.
    """
    H = H_ss.matrix
    E = _as_matrix(E)
    p = _as_powers(P)
    N, M = H.shape
    if E.shape[0] != M or p.shape != (E.shape[1],) or S_eta.shape != (N, N):
        raise DimensionMismatch(
            f"H {H.shape}, E {E.shape}, P {p.shape}, S_eta {S_eta.shape}")
    if not np.any(p):
        return 0.0
    G = whitened_channel(S_eta, H @ E) * np.sqrt(p)
    K = np.eye(E.shape[1]) + G.conj().T @ G
    sign, logdet = np.linalg.slogdet(K)
    return max(float(logdet) / np.log(2) / M, 0.0)


def diagonal_spectral_efficiency(eigenvalues, P, cfg: OfdmConfig) -> float:
    """``sum_i log2(1 + p_i lambda_i) / (N+L)`` for a diagonalized channel."""
    lam = np.asarray(eigenvalues, dtype=float)
    p = _as_powers(P)
    return float(np.sum(np.log2(1.0 + p * lam))) / cfg.block_length


def primary_leakage(H_sp_conv: np.ndarray, E, cfg: OfdmConfig):
    """Residual secondary signal at the primary receiver.

    Returns
    -------
    (pre_dft, post_dft) : (float, float)
        Frobenius norm of rows ``L..N+L-1`` of ``H_sp E`` (the samples kept
        after CP removal) and of ``F B H_sp E``.
    """
    E = _as_matrix(E)
    L = cfg.cp_length
    if H_sp_conv.shape != (cfg.block_length, cfg.block_length) or E.shape[0] != cfg.block_length:
        raise DimensionMismatch(f"H {H_sp_conv.shape}, E {E.shape}")
    Y = H_sp_conv @ E
    F = dft_matrix(cfg.n_subcarriers)
    post = F @ cp_removal_matrix(cfg) @ Y
    return float(np.linalg.norm(Y[L:])), float(np.linalg.norm(post))


def primary_subcarrier_gains(H_pp: ReducedChannel, cfg: OfdmConfig) -> np.ndarray:
    """Diagonal of ``H_pp A F^-1``, the per-subcarrier primary channel."""
    F = dft_matrix(cfg.n_subcarriers)
    D = H_pp.matrix @ cp_insertion_matrix(cfg) @ F.conj().T
    return np.diag(D).copy()


def primary_spectral_efficiency(H_pp: ReducedChannel, cfg: OfdmConfig,
                                with_secondary: bool = False, E=None, P=None,
                                H_sp: ReducedChannel | None = None) -> float:
    """Primary OFDM rate ``sum_k log2(1 + SINR_k) / (N+L)``.

    With ``with_secondary`` the secondary signal ``E diag(P) E^H`` seen
    through ``H_sp`` after CP removal and DFT is added to the noise of every
    subcarrier; for an aligned precoder that term vanishes.
    """
    lam = primary_subcarrier_gains(H_pp, cfg)
    noise = np.full(cfg.n_subcarriers, cfg.noise_var)
    if with_secondary:
        if E is None or P is None or H_sp is None:
            raise ValueError("with_secondary needs E, P and H_sp")
        X = H_sp.matrix @ _as_matrix(E)
        noise = noise + np.einsum("ij,j,ij->i", X, _as_powers(P), X.conj()).real
    sinr = cfg.p_primary * np.abs(lam) ** 2 / noise
    return float(np.sum(np.log2(1.0 + sinr))) / cfg.block_length
