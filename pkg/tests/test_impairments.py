"""Tests for the impaired channel model and improper noise generation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afdmlink.daft import AfdmParams, conj_operator, daft_matrix
from afdmlink.impairments import (
    ChannelConfig,
    ChannelRealization,
    CfoRealization,
    ImpairmentParams,
    apply_channel_time,
    build_heff,
    delta_diag,
    derive_iq_params,
    draw_residual_cfo,
    gen_improper_noise,
    sample_channel,
    time_channel_matrix,
)

PHI_8_DEG = np.deg2rad(8.0)


def matrix_form_rx(s, ch, eps, iq, w):
    """Independent matrix-form evaluation of the impaired received signal:
    mu D_eps (B s + w) + nu D_-eps (B* s* + w*) with B the cyclic channel."""
    n = len(s)
    b = time_channel_matrix(n, ch)
    epsilon = eps.epsilon if isinstance(eps, CfoRealization) else eps
    d = np.diag(delta_diag(epsilon, n))
    return (
        iq.mu * d @ (b @ s + w)
        + iq.nu * np.conj(d) @ (np.conj(b) @ np.conj(s) + np.conj(w))
    )


class TestDeriveIqParams:
    def test_ideal_hardware(self):
        assert derive_iq_params(0.0, 0.0) == (1 + 0j, 0j)

    def test_reference_operating_point(self):
        mu, nu = derive_iq_params(0.1, PHI_8_DEG)
        assert np.isclose(mu, 0.990268 + 0.013917j, atol=1e-6)
        assert np.isclose(nu, 0.099027 - 0.139173j, atol=1e-6)

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(-0.5, 0.5, allow_nan=False),
        st.floats(-np.pi, np.pi, allow_nan=False),
    )
    def test_power_identity(self, psi, phi):
        mu, nu = derive_iq_params(psi, phi)
        assert abs(abs(mu) ** 2 + abs(nu) ** 2 - (1 + psi**2)) < 1e-12

    def test_params_recompute_mu_nu(self):
        iq = ImpairmentParams(psi=0.1, phi=PHI_8_DEG)
        assert iq.mu == derive_iq_params(0.1, PHI_8_DEG)[0]
        assert iq.nu == derive_iq_params(0.1, PHI_8_DEG)[1]


class TestDrawResidualCfo:
    def test_zero_variance_is_exactly_zero(self):
        assert draw_residual_cfo(0.0, np.random.default_rng(0)).epsilon == 0.0

    def test_sample_statistics(self):
        rng = np.random.default_rng(42)
        draws = np.array([draw_residual_cfo(0.1, rng).epsilon for _ in range(10**5)])
        assert 0.095 < draws.var() < 0.105
        assert abs(draws.mean()) < 0.01

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            draw_residual_cfo(-1e-3, np.random.default_rng(0))


class TestSampleChannel:
    def test_mean_power_is_unity(self):
        cfg = ChannelConfig(block_len=64)
        rng = np.random.default_rng(3)
        power = np.mean(
            [np.sum(np.abs(sample_channel(cfg, rng).gains) ** 2) for _ in range(10**4)]
        )
        assert abs(power - 1.0) < 0.03

    def test_integer_mode_doppler_indices(self):
        cfg = ChannelConfig(block_len=64, doppler_mode="integer")
        rng = np.random.default_rng(5)
        for _ in range(200):
            ch = sample_channel(cfg, rng)
            idx = ch.dopplers * 64
            assert np.allclose(idx, np.round(idx))
            assert np.all(np.abs(idx) <= 2.0)

    def test_fractional_mode_bounds(self):
        cfg = ChannelConfig(block_len=64, doppler_mode="fractional")
        rng = np.random.default_rng(5)
        for _ in range(200):
            ch = sample_channel(cfg, rng)
            assert np.all(np.abs(ch.dopplers * 64) <= 2.0)

    def test_rejects_bad_delays(self):
        with pytest.raises(ValueError):
            ChannelConfig(block_len=64, num_paths=2, delays=(0, 0))
        with pytest.raises(ValueError):
            ChannelConfig(block_len=4, num_paths=3, delays=(0, 1, 4))


class TestBuildHeff:
    def setup_method(self):
        self.p = AfdmParams.from_k(64, 5, c2=0.0)

    def test_identity_channel(self):
        ch = ChannelRealization(np.array([1.0 + 0j]), (0,), np.array([0.0]))
        h = build_heff(self.p, ch, 0.0)
        assert np.abs(h - np.eye(64)).max() < 1e-10

    def test_sparse_rows_without_cfo(self):
        rng = np.random.default_rng(11)
        cfg = ChannelConfig(block_len=64, doppler_mode="integer")
        for _ in range(10):
            ch = sample_channel(cfg, rng)
            h = build_heff(self.p, ch, 0.0)
            nnz = (np.abs(h) > 1e-9).sum(axis=1)
            assert nnz.max() <= ch.num_paths

    def test_energy_conservation(self):
        rng = np.random.default_rng(12)
        cfg = ChannelConfig(block_len=64)
        ch = sample_channel(cfg, rng)
        for epsilon in (0.0, 0.017, 0.3):
            h = build_heff(self.p, ch, epsilon)
            expected = 64 * np.sum(np.abs(ch.gains) ** 2)
            assert abs(np.linalg.norm(h, "fro") ** 2 - expected) / expected < 1e-8

    def test_cfo_spreads_energy_off_support(self):
        rng = np.random.default_rng(13)
        ch = sample_channel(ChannelConfig(block_len=64), rng)
        h0 = build_heff(self.p, ch, 0.0)
        h1 = build_heff(self.p, ch, 0.05)
        support = np.abs(h0) > 1e-9
        off0 = np.sum(np.abs(h0[~support]) ** 2)
        off1 = np.sum(np.abs(h1[~support]) ** 2)
        assert off1 > off0


class TestApplyChannelTime:
    def setup_method(self):
        self.rng = np.random.default_rng(21)
        self.n = 64
        self.cfg = ChannelConfig(block_len=self.n)

    def _random_signal(self):
        return self.rng.standard_normal(self.n) + 1j * self.rng.standard_normal(self.n)

    def test_transparent_for_ideal_everything(self):
        s = self._random_signal()
        ch = ChannelRealization(np.array([1.0 + 0j]), (0,), np.array([0.0]))
        iq = ImpairmentParams(0.0, 0.0)
        out = apply_channel_time(s, ch, 0.0, iq, np.zeros(self.n))
        assert np.linalg.norm(out - s) < 1e-12

    def test_matches_matrix_form(self):
        iq = ImpairmentParams(psi=0.1, phi=PHI_8_DEG)
        for _ in range(20):
            s = self._random_signal()
            ch = sample_channel(self.cfg, self.rng)
            eps = CfoRealization(self.rng.normal(0, 0.3))
            w = self._random_signal()
            got = apply_channel_time(s, ch, eps, iq, w)
            want = matrix_form_rx(s, ch, eps, iq, w)
            assert np.abs(got - want).max() < 1e-10

    def test_no_image_branch(self):
        s = self._random_signal()
        ch = sample_channel(self.cfg, self.rng)
        w = self._random_signal()
        iq = ImpairmentParams(0.0, 0.0)
        epsilon = 0.07
        out = apply_channel_time(s, ch, epsilon, iq, w)
        b = time_channel_matrix(self.n, ch)
        want = delta_diag(epsilon, self.n) * (b @ s + w)
        assert np.abs(out - want).max() < 1e-10

    def test_affine_domain_decomposition(self):
        # A r (noiseless) == mu H_eff x + nu A A^T conj(H_eff) conj(x)
        p = AfdmParams.from_k(self.n, 5, c2=1e-4)
        a = daft_matrix(p)
        g = conj_operator(p, daft=a)
        iq = ImpairmentParams(psi=0.1, phi=PHI_8_DEG)
        for _ in range(10):
            x = self._random_signal()
            ch = sample_channel(self.cfg, self.rng)
            eps = CfoRealization(self.rng.normal(0, 0.1))
            r = apply_channel_time(a.conj().T @ x, ch, eps, iq, np.zeros(self.n))
            h = build_heff(p, ch, eps, daft=a)
            want = iq.mu * h @ x + iq.nu * g @ np.conj(h) @ np.conj(x)
            assert np.abs(a @ r - want).max() < 1e-9

    def test_length_mismatch(self):
        ch = sample_channel(self.cfg, self.rng)
        with pytest.raises(ValueError):
            apply_channel_time(np.zeros(self.n), ch, 0.0, ImpairmentParams(0, 0), np.zeros(self.n - 1))


class TestGenImproperNoise:
    def test_proper_when_no_image(self):
        p = AfdmParams.from_k(16, 5)
        rng = np.random.default_rng(31)
        iq = ImpairmentParams(0.0, 0.0)
        samples = np.array([gen_improper_noise(p, iq, 0.0, 1.0, rng) for _ in range(20000)])
        pseudo = samples.T @ samples / len(samples)
        cov = samples.T @ samples.conj() / len(samples)
        assert np.abs(pseudo).max() < 0.05
        assert np.abs(np.diag(cov) - 1.0).max() < 0.05

    def test_covariance_and_pseudo_covariance(self):
        p = AfdmParams.from_k(16, 5)
        rng = np.random.default_rng(32)
        iq = ImpairmentParams(psi=0.1, phi=PHI_8_DEG)
        k = 50000
        samples = np.array([gen_improper_noise(p, iq, 0.02, 1.0, rng) for _ in range(k)])
        cov = samples.T @ samples.conj() / k
        pseudo = samples.T @ samples / k
        assert np.abs(np.diag(cov).real - 1.01).max() < 0.03
        expected = 2 * iq.mu * iq.nu * conj_operator(p)
        rel = np.linalg.norm(pseudo - expected, "fro") / np.linalg.norm(expected, "fro")
        assert rel < 0.08

    def test_rejects_nonpositive_variance(self):
        p = AfdmParams.from_k(16, 5)
        with pytest.raises(ValueError):
            gen_improper_noise(p, ImpairmentParams(0, 0), 0.0, 0.0, np.random.default_rng(0))
