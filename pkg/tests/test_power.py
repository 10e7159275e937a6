import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cia_sim.errors import AllZeroEigenvalues, NotPositiveDefinite
from cia_sim.power import (NoiseModel, eigenmode_loading, interference_covariance,
                           stream_loading, waterfill, whiten)
from cia_sim.signal_model import (OfdmConfig, PdpModel, cp_insertion_matrix, generate_channel,
                                  reduced_channel)

from oracles import random_psd, waterfill_bisection

gains = arrays(np.float64, st.integers(1, 12),
               elements=st.floats(1e-3, 1e3, allow_nan=False))
budgets = st.floats(1e-3, 1e3)


def test_waterfill_symmetric():
    a = waterfill([2, 2, 2, 2], 8)
    np.testing.assert_allclose(a.p, 2.0)
    assert a.mu == pytest.approx(2.5)


def test_waterfill_drops_weak_stream():
    # both streams active would need mu = 3 and p = (2, -1)
    p_ref, mu_ref = waterfill_bisection([1, 0.25], 1)
    np.testing.assert_allclose(p_ref, [1, 0], atol=1e-12)
    assert mu_ref == pytest.approx(2.0)
    a = waterfill([1, 0.25], 1)
    np.testing.assert_allclose(a.p, [1, 0], atol=1e-15)
    assert a.mu == pytest.approx(2.0)


def test_waterfill_single_stream():
    a = waterfill([5], 3)
    np.testing.assert_allclose(a.p, [3])
    assert a.mu == pytest.approx(3.2)


def test_waterfill_zero_gains():
    a = waterfill([0, 4, 0], 2)
    np.testing.assert_allclose(a.p, [0, 2, 0])
    with pytest.raises(AllZeroEigenvalues):
        waterfill([0, 0], 1)
    assert waterfill([0, 0], 0).total == 0
    with pytest.raises(ValueError):
        waterfill([1, -1], 1)


def test_waterfill_keeps_input_order():
    a = waterfill([0.1, 10, 1], 2)
    assert a.p[1] > a.p[2] >= a.p[0]


@given(gains, budgets)
def test_waterfill_matches_bisection(lam, budget):
    a = waterfill(lam, budget)
    p_ref, _ = waterfill_bisection(lam, budget)
    np.testing.assert_allclose(a.p, p_ref, atol=1e-8 * max(1.0, budget))


@given(gains, budgets)
def test_waterfill_kkt(lam, budget):
    a = waterfill(lam, budget)
    assert a.p.sum() <= budget * (1 + 1e-9)
    assert np.all(a.p >= 0)
    act = a.p > 0
    tol = 1e-9 * max(1.0, a.mu)
    assert np.all(np.abs(a.mu - 1 / lam[act] - a.p[act]) < tol)
    assert np.all(a.mu <= 1 / lam[~act] + tol)
    if act.all():
        assert a.p.sum() == pytest.approx(budget, rel=1e-9)


@given(gains, budgets, st.floats(1.0, 10.0))
def test_waterfill_monotone_in_budget(lam, budget, factor):
    lo, hi = waterfill(lam, budget), waterfill(lam, budget * factor)
    assert np.all(hi.p >= lo.p - 1e-9 * budget * factor)


def test_waterfill_beats_random_allocations():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        L = rng.integers(1, 9)
        lam = rng.exponential(size=L) * 10 ** rng.uniform(-2, 2)
        budget = 10 ** rng.uniform(-2, 2)
        best = np.sum(np.log2(1 + waterfill(lam, budget).p * lam))
        trial = rng.dirichlet(np.ones(L), size=10_000) * budget
        assert best >= np.log2(1 + trial * lam).sum(axis=1).max() - 1e-12


def test_whiten_scaled_identity():
    np.testing.assert_allclose(whiten(4 * np.eye(3)), 0.5 * np.eye(3))


@pytest.mark.parametrize("n", [1, 4, 16])
def test_whiten_properties(n, rng):
    S = random_psd(n, rng)
    W = whiten(S)
    np.testing.assert_allclose(W, W.conj().T, atol=1e-12)
    np.testing.assert_allclose(W @ S @ W, np.eye(n), atol=1e-9)
    ref = np.sort(np.linalg.eigvalsh(S) ** -0.5)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(W)), ref, rtol=1e-10)


def test_whiten_rejects_singular():
    with pytest.raises(NotPositiveDefinite):
        whiten(np.diag([1.0, 0.0]))


def _ps(cfg, seed):
    return reduced_channel(generate_channel(cfg, PdpModel.uniform(), seed), cfg)


def test_noise_only_covariance(small_cfg):
    S = interference_covariance(NoiseModel(0.3), _ps(small_cfg, 1), small_cfg)
    np.testing.assert_array_equal(S, 0.3 * np.eye(16))
    S = interference_covariance(NoiseModel(0.3, True, p_primary=0.0), _ps(small_cfg, 1), small_cfg)
    np.testing.assert_array_equal(S, 0.3 * np.eye(16))


@pytest.mark.parametrize("seed", range(5))
def test_interference_covariance(small_cfg, seed):
    H = _ps(small_cfg, seed)
    S = interference_covariance(NoiseModel(0.2, True, p_primary=1.7), H, small_cfg)
    assert np.linalg.norm(S - S.conj().T) < 1e-12 * np.linalg.norm(S)
    assert np.linalg.eigvalsh(S).min() >= 0.2 * (1 - 1e-10)
    # trace: each received subcarrier collects P_p |<row, column of A>|^2 per primary symbol
    HA = H.matrix @ cp_insertion_matrix(small_cfg)
    naive = sum(1.7 * abs(HA[i, j]) ** 2 for i in range(16) for j in range(16)) + 16 * 0.2
    assert np.trace(S).real == pytest.approx(naive, rel=1e-9)


def test_interference_covariance_is_diagonal_for_ofdm(small_cfg):
    # H_ps A F^-1 is diagonal, so the primary interference is white per subcarrier
    S = interference_covariance(NoiseModel(0.2, True, 1.0), _ps(small_cfg, 4), small_cfg)
    off = S - np.diag(np.diag(S))
    assert np.abs(off).max() < 1e-12 * np.abs(S).max()


def test_stream_loading_uses_column_gains(rng):
    G = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    a = stream_loading(G, 5.0)
    ref = waterfill(np.linalg.norm(G, axis=0) ** 2, 5.0)
    np.testing.assert_allclose(a.p, ref.p)


def test_eigenmode_loading_spends_true_budget(rng):
    E = rng.standard_normal((10, 3)) + 1j * rng.standard_normal((10, 3))
    G = rng.standard_normal((6, 10)) @ E
    E_l, P = eigenmode_loading(E, G, 4.0)
    np.testing.assert_allclose(np.linalg.norm(E_l, axis=0), 1.0)
    assert np.trace(E_l @ np.diag(P.p) @ E_l.conj().T).real == pytest.approx(4.0)
    # the loaded directions diagonalize the effective channel
    GE = G @ np.linalg.lstsq(E, E_l, rcond=None)[0]
    gram = GE.conj().T @ GE
    assert np.abs(gram - np.diag(np.diag(gram))).max() < 1e-10 * np.abs(gram).max()
