"""Null-space precoders for the secondary transmitter.

All three precoders place the secondary signal in the kernel of the reduced
secondary-to-primary channel, so that CP removal and the DFT at the primary
receiver discard it. They differ in the basis of that kernel:

* ``cia``: the kernel basis rotated onto the eigenmodes of the whitened
  secondary channel (optimal, semi-unitary);
* ``vfdm``: Vandermonde vectors on the roots of the interference channel
  polynomial, orthonormalized by modified Gram-Schmidt;
* ``nonunitary``: the kernel basis mixed by a random non-unitary matrix.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import comb

from .errors import (AlignmentFailure, DegenerateChannel, GramSchmidtBreakdown, RepeatedRoots,
                     VfdmFailure)
from .power import whitened_channel
from .signal_model import ChannelRealization, OfdmConfig, ReducedChannel, reduced_channel

KERNEL_TOL = 1e-9
# computed double roots split by ~sqrt(eps) relative
ROOT_CLUSTER_TOL = 1e-7
PIVOT_TOL = 1e-12
ALIGN_TOL = 1e-10


class PrecoderKind(str, enum.Enum):
    CIA_OPTIMAL = "cia"
    VFDM_ROOT = "vfdm"
    NON_UNITARY = "nonunitary"


@dataclass(frozen=True, eq=False)
class KernelBasis:
    V: np.ndarray

    @property
    def dim(self) -> int:
        return self.V.shape[1]


@dataclass(frozen=True, eq=False)
class Precoder:
    """Precoding matrix ``E`` (``(N+L) x L``).

    ``rotation`` holds the coefficients of ``E`` in the basis it was built
    from: ``V_g`` for CIA, ``Gamma`` for the non-unitary baseline and the
    inverse Gram-Schmidt triangle ``R^-1`` for VFDM.
    """

    E: np.ndarray
    kind: PrecoderKind
    rotation: np.ndarray


def kernel_basis(H_sp: ReducedChannel, tol: float = KERNEL_TOL) -> KernelBasis:
    """Orthonormal basis of ``ker(H_sp)`` from a full SVD."""
    H = H_sp.matrix
    N, M = H.shape
    _, s, Vh = np.linalg.svd(H, full_matrices=True)
    rank = int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0
    if M - rank > M - N:
        raise DegenerateChannel(
            f"kernel dimension {M - rank} exceeds {M - N} (rank {rank} < {N})")
    return KernelBasis(Vh[N:].conj().T)


def cia_precoder(V: KernelBasis, H_ss: ReducedChannel, S_eta: np.ndarray):
    """Optimal precoder ``E = V V_g`` and the gains of its streams.

    ``V_g`` collects the right singular vectors of the whitened effective
    channel ``G = S_eta^{-1/2} H_ss V``; the returned eigenvalues of
    ``G G^H`` are sorted in descending order and are the water-filling gains
    of the columns of ``E``.
    """
    G = whitened_channel(S_eta, H_ss.matrix @ V.V)
    _, s, Vgh = np.linalg.svd(G, full_matrices=False)
    Vg = Vgh.conj().T
    eig = np.zeros(V.dim)
    eig[:s.size] = s ** 2
    return Precoder(V.V @ Vg, PrecoderKind.CIA_OPTIMAL, Vg), eig


def polynomial_roots(coeffs) -> np.ndarray:
    """Roots of ``sum_k c_k z^(n-k)`` (highest degree first) via the companion matrix."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size < 2:
        return np.zeros(0, dtype=complex)
    if c[0] == 0:
        raise VfdmFailure("leading channel tap is zero; polynomial degree drops")
    n = c.size - 1
    C = np.zeros((n, n), dtype=complex)
    C[0] = -c[1:] / c[0]
    C[np.arange(1, n), np.arange(n - 1)] = 1.0
    return np.linalg.eigvals(C)


def cluster_roots(roots: np.ndarray, tol: float = ROOT_CLUSTER_TOL):
    """Group roots closer than ``tol`` relative distance.

    Returns a list of ``(representative, multiplicity)``.
    """
    remaining = list(roots)
    clusters = []
    while remaining:
        a = remaining.pop(0)
        members = [a]
        keep = []
        for b in remaining:
            scale = max(abs(a), abs(b))
            if abs(a - b) <= tol * scale or scale == 0:
                members.append(b)
            else:
                keep.append(b)
        remaining = keep
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters


def vandermonde_columns(roots: np.ndarray, length: int,
                        cluster_tol: float = ROOT_CLUSTER_TOL) -> np.ndarray:
    """Unit-norm columns ``(1, a, ..., a^(length-1))`` for each root.

    A root of multiplicity ``m`` contributes its ``m`` confluent columns
    ``d^j/da^j (a^n) / j!``. Columns for ``|a| > 1`` are computed already
    divided by ``a^(length-1-j)`` so nothing overflows.
    """
    n = np.arange(length)
    cols = []
    for a, mult in cluster_roots(np.asarray(roots), cluster_tol):
        for j in range(mult):
            shift = length - 1 - j if abs(a) > 1 else 0
            live = n >= j
            col = np.where(live, comb(n, j) * a ** np.where(live, n - j - shift, 0), 0)
            norm = np.linalg.norm(col)
            if not np.isfinite(norm) or norm == 0:
                raise RepeatedRoots(f"confluent column {j} of root {a:.3g} degenerates")
            cols.append(col / norm)
    return np.column_stack(cols).astype(complex)


def modified_gram_schmidt(X: np.ndarray, pivot_tol: float = PIVOT_TOL,
                          reorthogonalize: bool = True):
    """QR factorization ``X = Q R`` by modified Gram-Schmidt.

    Every column is swept twice when ``reorthogonalize`` is set. Raises
    :class:`GramSchmidtBreakdown` if a column's residual norm after
    projection, relative to its original norm, falls below ``pivot_tol``.
    """
    m, n = X.shape
    Q = np.array(X, dtype=complex)
    R = np.zeros((n, n), dtype=complex)
    for j in range(n):
        v = Q[:, j]
        ref = np.linalg.norm(v)
        for _ in range(2 if reorthogonalize else 1):
            for i in range(j):
                r = np.vdot(Q[:, i], v)
                R[i, j] += r
                v -= r * Q[:, i]
        pivot = np.linalg.norm(v)
        if not pivot > pivot_tol * ref:
            raise GramSchmidtBreakdown(j, pivot / ref if ref else 0.0)
        R[j, j] = pivot
        Q[:, j] = v / pivot
    return Q, R


def order_roots(roots: np.ndarray) -> np.ndarray:
    """Descending modulus, ties broken by angle, so output is deterministic."""
    return roots[np.lexsort((np.angle(roots), -np.abs(roots)))]


def vfdm_root_precoder(h_sp: ChannelRealization, cfg: OfdmConfig) -> Precoder:
    """Orthonormal root-based VFDM precoder.

    The roots of ``p(z) = sum_k h_k z^(l-k)`` annihilate every row of the
    banded Toeplitz channel, since row ``j`` applied to a Vandermonde vector
    on ``a`` gives ``a^j p(a)``. Inaccurate roots break that identity, so
    the result is rejected with :class:`AlignmentFailure` when
    ``||H_sp E||_F > ALIGN_TOL ||H_sp||_F``.
    """
    if h_sp.order != cfg.cp_length:
        raise ValueError("VFDM needs the channel order to equal the CP length")
    roots = order_roots(polynomial_roots(h_sp.taps))
    X = vandermonde_columns(roots, cfg.block_length)
    Q, R = modified_gram_schmidt(X)
    H = reduced_channel(h_sp, cfg).matrix
    leak = np.linalg.norm(H @ Q) / np.linalg.norm(H)
    if leak > ALIGN_TOL:
        raise AlignmentFailure(f"relative leakage {leak:.3e}")
    rotation = solve_triangular(R, np.eye(R.shape[0], dtype=complex))
    return Precoder(Q, PrecoderKind.VFDM_ROOT, rotation)


def random_combination(L: int, rng_seed: int) -> np.ndarray:
    """``L x L`` i.i.d. complex Gaussian matrix with unit-norm columns."""
    rng = np.random.default_rng(rng_seed)
    G = rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L))
    return G / np.linalg.norm(G, axis=0)


def nonunitary_baseline(V: KernelBasis, rng_seed: int) -> Precoder:
    gamma = random_combination(V.dim, rng_seed)
    return Precoder(V.V @ gamma, PrecoderKind.NON_UNITARY, gamma)
