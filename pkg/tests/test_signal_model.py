import numpy as np
import pytest
from hypothesis import given, strategies as st

from cia_sim.signal_model import (PDP_PRESETS, ChannelRealization, OfdmConfig, PdpModel,
                                  banded_toeplitz, conv_matrix, cp_insertion_matrix,
                                  cp_removal_matrix, derive_seed, dft_matrix, generate_channel,
                                  reduced_channel, sample_taps)

from oracles import circular_convolution

dims = st.integers(1, 12).flatmap(
    lambda L: st.tuples(st.integers(L, 3 * L + 4), st.just(L), st.integers(0, L)))


def cfg_of(N, L, l):
    return OfdmConfig(n_subcarriers=N, cp_length=L, channel_order=l)


def test_config_rejects_short_prefix():
    with pytest.raises(ValueError):
        OfdmConfig(n_subcarriers=16, cp_length=4, channel_order=5)
    with pytest.raises(ValueError):
        OfdmConfig(n_subcarriers=3, cp_length=4, channel_order=1)
    with pytest.raises(ValueError):
        OfdmConfig(noise_var=0.0)


def test_single_tap_has_unit_variance():
    cfg = cfg_of(4, 2, 0)
    assert PdpModel.uniform().tap_variances(0) == pytest.approx([1.0])
    ch = generate_channel(cfg, PdpModel.uniform(), 3)
    assert ch.taps.shape == (1,)


def test_exponential_profile_ratio():
    var = PdpModel.exponential(2.0).tap_variances(32)
    assert var.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(var[1:] / var[:-1], np.exp(-2.0), rtol=1e-12)
    assert np.all(np.diff(var) < 0)


def test_uniform_profile():
    np.testing.assert_allclose(PdpModel.uniform().tap_variances(32), 1 / 33)


def test_presets():
    assert PdpModel.from_name("exp-slow").decay_ratio == 0.75
    assert PdpModel.from_name("exp-fast").decay_ratio == 2.0
    with pytest.raises(ValueError):
        PdpModel.from_name("rician")


def test_generate_channel_deterministic():
    cfg = OfdmConfig()
    a = generate_channel(cfg, PdpModel.uniform(), 42)
    b = generate_channel(cfg, PdpModel.uniform(), 42)
    assert a.taps.tobytes() == b.taps.tobytes()
    assert a.taps.shape == (33,)


def test_derived_seeds_distinct():
    seeds = {derive_seed(1, t, k) for t in range(50) for k in range(5)}
    assert len(seeds) == 250
    assert derive_seed(1, 3, 2) == derive_seed(1, 3, 2)


@pytest.mark.parametrize("name", sorted(PDP_PRESETS))
def test_tap_sample_variance(name):
    pdp = PDP_PRESETS[name]
    taps = sample_taps(pdp, 32, np.random.default_rng(9), size=100_000)
    est = np.mean(np.abs(taps) ** 2, axis=0)
    np.testing.assert_allclose(est, pdp.tap_variances(32), rtol=0.05)
    # circular symmetry: real and imaginary parts carry half the power each
    np.testing.assert_allclose(np.mean(taps.real ** 2, axis=0) / est, 0.5, atol=0.03)


def test_cp_insertion_example():
    A = cp_insertion_matrix(cfg_of(4, 2, 1))
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0],
                         [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    np.testing.assert_array_equal(A, expected)
    np.testing.assert_array_equal(A @ np.array([1, 2, 3, 4]), [3, 4, 1, 2, 3, 4])


def test_cp_removal_example():
    B = cp_removal_matrix(cfg_of(4, 2, 1))
    np.testing.assert_array_equal(B @ np.arange(1, 7), [3, 4, 5, 6])


@given(dims)
def test_cp_matrices_properties(d):
    cfg = cfg_of(*d)
    A, B = cp_insertion_matrix(cfg), cp_removal_matrix(cfg)
    N, L = cfg.n_subcarriers, cfg.cp_length
    # the last L columns carry the prefix copy as well
    np.testing.assert_array_equal(A.T @ A, np.diag(np.r_[np.ones(N - L), 2 * np.ones(L)]))
    np.testing.assert_array_equal(B @ B.T, np.eye(N))
    np.testing.assert_array_equal(B @ A, np.eye(N))


def test_cp_transparent_for_flat_primary():
    cfg = cfg_of(8, 2, 0)
    F = dft_matrix(8)
    s = np.arange(8) + 1j
    x = cp_insertion_matrix(cfg) @ F.conj().T @ s
    np.testing.assert_allclose(cp_removal_matrix(cfg) @ x, F.conj().T @ s)


def test_dft_small():
    assert dft_matrix(1) == pytest.approx(np.array([[1.0]]))
    np.testing.assert_allclose(dft_matrix(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2),
                               atol=1e-15)


@pytest.mark.parametrize("N", [1, 3, 16, 128])
def test_dft_unitary(N):
    F = dft_matrix(N)
    assert np.linalg.norm(F @ F.conj().T - np.eye(N)) < 1e-12
    x = np.random.default_rng(N).standard_normal(N)
    np.testing.assert_allclose(F @ x, np.fft.fft(x, norm="ortho"), atol=1e-12)


def test_conv_single_tap():
    cfg = cfg_of(4, 2, 0)
    H = conv_matrix(ChannelRealization(np.array([2 - 1j])), cfg)
    np.testing.assert_array_equal(H, (2 - 1j) * np.eye(6))


def test_conv_first_rows():
    cfg = cfg_of(4, 2, 1)
    h0, h1 = 1.5 + 0.5j, -0.25j
    H = conv_matrix(ChannelRealization(np.array([h0, h1])), cfg)
    np.testing.assert_array_equal(H[0], [h0, 0, 0, 0, 0, h1])
    np.testing.assert_array_equal(H[1], [h1, h0, 0, 0, 0, 0])


@given(dims, st.integers(0, 2 ** 32 - 1))
def test_conv_matches_direct_convolution(d, seed):
    cfg = cfg_of(*d)
    rng = np.random.default_rng(seed)
    ch = generate_channel(cfg, PdpModel.uniform(), seed)
    x = rng.standard_normal(cfg.block_length) + 1j * rng.standard_normal(cfg.block_length)
    y = circular_convolution(ch.taps, x)
    assert np.linalg.norm(conv_matrix(ch, cfg) @ x - y) <= 1e-12 * np.linalg.norm(y)


def test_reduced_single_tap():
    cfg = cfg_of(4, 2, 0)
    R = reduced_channel(ChannelRealization(np.array([1.0 + 0j])), cfg)
    np.testing.assert_allclose(R.matrix, dft_matrix(4) @ np.hstack([np.zeros((4, 2)), np.eye(4)]))


@given(dims, st.sampled_from(sorted(PDP_PRESETS)), st.integers(0, 2 ** 32 - 1))
def test_reduced_two_routes_agree(d, name, seed):
    cfg = cfg_of(*d)
    ch = generate_channel(cfg, PDP_PRESETS[name], seed)
    full = dft_matrix(cfg.n_subcarriers) @ cp_removal_matrix(cfg) @ conv_matrix(ch, cfg)
    R = reduced_channel(ch, cfg).matrix
    assert R.shape == (cfg.n_subcarriers, cfg.block_length)
    assert np.linalg.norm(full - R) <= 1e-12 * np.linalg.norm(full)


def test_banded_toeplitz_first_row():
    cfg = cfg_of(6, 3, 3)
    h = np.array([1, 2, 3, 4], dtype=complex)
    T = banded_toeplitz(ChannelRealization(h), cfg)
    np.testing.assert_array_equal(T[0, :5], [4, 3, 2, 1, 0])


def test_reduced_rank_generic():
    cfg = cfg_of(16, 4, 4)
    R = reduced_channel(generate_channel(cfg, PdpModel.uniform(), 11), cfg).matrix
    s = np.linalg.svd(R, compute_uv=False)
    assert s.size == 16 and s[-1] > 1e-9 * s[0]


@pytest.mark.parametrize("name", sorted(PDP_PRESETS))
def test_kernel_dimension_many_draws(name):
    cfg = OfdmConfig()
    pdp = PDP_PRESETS[name]
    for t in range(1000 if name == "uniform" else 300):
        R = reduced_channel(generate_channel(cfg, pdp, derive_seed(77, t, 0)), cfg).matrix
        s = np.linalg.svd(R, compute_uv=False)
        # N nonzero singular values; the remaining L dimensions are the kernel
        assert s[-1] / s[0] > 1e-9
