"""Transmission model of the OFDM two-tier downlink.

Builds the deterministic block matrices (cyclic prefix insertion/removal,
unitary DFT, channel convolution) and draws Rayleigh channel taps under
uniform or exponentially decaying power delay profiles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class OfdmConfig:
    """Block dimensions and power levels.

    Attributes
    ----------
    n_subcarriers : int
        Number of OFDM subcarriers ``N``.
    cp_length : int
        Cyclic prefix length ``L`` in samples.
    channel_order : int
        Channel order ``l``; every link has ``l + 1`` taps.
    p_primary : float
        Primary transmit power per input symbol.
    p_secondary : float
        Secondary transmit power per precoded symbol.
    noise_var : float
        Noise variance per complex sample.
    """

    n_subcarriers: int = 128
    cp_length: int = 32
    channel_order: int = 32
    p_primary: float = 1.0
    p_secondary: float = 1.0
    noise_var: float = 1.0

    def __post_init__(self):
        if self.n_subcarriers < 1 or self.cp_length < 1:
            raise ValueError("n_subcarriers and cp_length must be positive")
        if self.channel_order < 0:
            raise ValueError("channel_order must be non-negative")
        if self.cp_length < self.channel_order:
            raise ValueError("cyclic prefix must cover the channel order (L >= l)")
        if self.n_subcarriers < self.cp_length:
            raise ValueError("need N >= L")
        if self.p_primary < 0 or self.p_secondary < 0:
            raise ValueError("powers must be non-negative")
        if not self.noise_var > 0:
            raise ValueError("noise_var must be positive")

    @property
    def block_length(self) -> int:
        return self.n_subcarriers + self.cp_length

    @property
    def n_taps(self) -> int:
        return self.channel_order + 1

    @property
    def power_budget(self) -> float:
        """Trace budget ``(N + L) * P_s`` of the secondary covariance."""
        return self.block_length * self.p_secondary


class PdpKind(str, enum.Enum):
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class PdpModel:
    """Power delay profile.

    ``decay_ratio`` is the sample time over the r.m.s. delay spread; it is
    ignored for the uniform profile.
    """

    kind: PdpKind = PdpKind.UNIFORM
    decay_ratio: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PdpKind(self.kind))
        if not self.decay_ratio > 0:
            raise ValueError("decay_ratio must be positive")

    @classmethod
    def uniform(cls) -> "PdpModel":
        return cls(PdpKind.UNIFORM)

    @classmethod
    def exponential(cls, decay_ratio: float) -> "PdpModel":
        return cls(PdpKind.EXPONENTIAL, decay_ratio)

    @classmethod
    def from_name(cls, name: str) -> "PdpModel":
        """Parse the CLI names ``uniform``, ``exp-fast`` and ``exp-slow``."""
        try:
            return PDP_PRESETS[name]
        except KeyError:
            raise ValueError(
                f"unknown PDP {name!r}; expected one of {sorted(PDP_PRESETS)}"
            ) from None

    def tap_variances(self, order: int) -> np.ndarray:
        """Per-tap variances, normalized to unit total power."""
        if self.kind is PdpKind.UNIFORM:
            var = np.ones(order + 1)
        else:
            var = np.exp(-np.arange(order + 1) * self.decay_ratio)
        return var / var.sum()


PDP_PRESETS = {
    "uniform": PdpModel.uniform(),
    "exp-slow": PdpModel.exponential(0.75),
    "exp-fast": PdpModel.exponential(2.0),
}


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    taps: np.ndarray
    pdp: PdpModel = field(default_factory=PdpModel)

    @property
    def order(self) -> int:
        return self.taps.size - 1


@dataclass(frozen=True, eq=False)
class ReducedChannel:
    """Post CP-removal, post-DFT channel ``F B H`` of shape ``N x (N+L)``."""

    matrix: np.ndarray

    @property
    def shape(self):
        return self.matrix.shape


def derive_seed(master_seed: int, trial: int, link: int) -> int:
    """64-bit seed for one (trial, link) stream, independent of execution order."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(trial, link))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_taps(pdp: PdpModel, order: int, rng: np.random.Generator,
                size: int | None = None) -> np.ndarray:
    """Draw circularly-symmetric Gaussian taps with the PDP variance profile.

    Returns shape ``(order + 1,)`` or ``(size, order + 1)``.
    """
    shape = (order + 1,) if size is None else (size, order + 1)
    std = np.sqrt(pdp.tap_variances(order) / 2.0)
    return std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channel(cfg: OfdmConfig, pdp: PdpModel, rng_seed: int) -> ChannelRealization:
    rng = np.random.default_rng(rng_seed)
    return ChannelRealization(sample_taps(pdp, cfg.channel_order, rng), pdp)


def cp_insertion_matrix(cfg: OfdmConfig) -> np.ndarray:
    """``(N+L) x N`` matrix prepending the last ``L`` samples of a block."""
    N, L = cfg.n_subcarriers, cfg.cp_length
    eye = np.eye(N)
    return np.vstack([eye[N - L:], eye])


def cp_removal_matrix(cfg: OfdmConfig) -> np.ndarray:
    """``N x (N+L)`` matrix ``[0 | I_N]`` discarding the first ``L`` samples."""
    N, L = cfg.n_subcarriers, cfg.cp_length
    return np.hstack([np.zeros((N, L)), np.eye(N)])


@lru_cache(maxsize=8)
def _dft(N: int) -> np.ndarray:
    jk = np.outer(np.arange(N), np.arange(N))
    F = np.exp(-2j * np.pi * (jk % N) / N) / np.sqrt(N)
    F.setflags(write=False)
    return F


def dft_matrix(N: int) -> np.ndarray:
    """Unitary DFT matrix, ``F[j, k] = exp(-2 pi i j k / N) / sqrt(N)``."""
    if N < 1:
        raise ValueError("N must be positive")
    return _dft(N)


def conv_matrix(ch: ChannelRealization, cfg: OfdmConfig) -> np.ndarray:
    """Circulant ``(N+L) x (N+L)`` convolution matrix of one link.

    Row ``r`` computes ``sum_k h_k x[(r - k) mod (N+L)]``, so the first ``l``
    rows carry the wrap-around (previous block) terms.
    """
    if ch.order > cfg.cp_length:
        raise ValueError("channel order exceeds the cyclic prefix")
    M = cfg.block_length
    H = np.zeros((M, M), dtype=complex)
    rows = np.arange(M)
    for k, hk in enumerate(ch.taps):
        H[rows, (rows - k) % M] += hk
    return H


def banded_toeplitz(ch: ChannelRealization, cfg: OfdmConfig) -> np.ndarray:
    """``B H``: the ``N x (N+L)`` banded Toeplitz part surviving CP removal."""
    N, L = cfg.n_subcarriers, cfg.cp_length
    T = np.zeros((N, cfg.block_length), dtype=complex)
    rows = np.arange(N)
    for k, hk in enumerate(ch.taps):
        T[rows, rows + L - k] = hk
    return T


def reduced_channel(ch: ChannelRealization, cfg: OfdmConfig) -> ReducedChannel:
    if ch.order > cfg.cp_length:
        raise ValueError("channel order exceeds the cyclic prefix")
    return ReducedChannel(dft_matrix(cfg.n_subcarriers) @ banded_toeplitz(ch, cfg))
