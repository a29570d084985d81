"""Tests for leakage/density metrics and matrix magnitude export."""

import numpy as np
import pytest

from afdmlink.analysis import (
    density_stats,
    export_matrix_magnitudes,
    import_matrix_magnitudes,
    leakage_metric,
)
from afdmlink.daft import AfdmParams, conj_operator, daft_matrix, mirror_permutation
from afdmlink.detector import build_composite_channel
from afdmlink.impairments import ChannelConfig, ImpairmentParams, build_heff, sample_channel


class TestLeakageMetric:
    def test_self_reference_has_zero_leakage(self):
        rng = np.random.default_rng(0)
        h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        m = leakage_metric(h, h)
        assert m.leakage == 0.0
        assert m.support_energy_fraction == 1.0

    def test_paired_average_increases_with_cfo_variance(self):
        p = AfdmParams.from_k(64, 5, c2=0.0)
        a = daft_matrix(p)
        cfg = ChannelConfig(block_len=64)
        rng = np.random.default_rng(1)
        leak_small, leak_large = [], []
        for _ in range(30):
            ch = sample_channel(cfg, rng)
            z = rng.standard_normal()
            h0 = build_heff(p, ch, 0.0, daft=a)
            leak_small.append(leakage_metric(build_heff(p, ch, np.sqrt(1e-3) * z, daft=a), h0).leakage)
            leak_large.append(leakage_metric(build_heff(p, ch, np.sqrt(1e-1) * z, daft=a), h0).leakage)
        assert 0.0 < np.mean(leak_small) < np.mean(leak_large)

    def test_total_energy_preserved_between_matrices(self):
        p = AfdmParams.from_k(64, 5)
        rng = np.random.default_rng(2)
        ch = sample_channel(ChannelConfig(block_len=64), rng)
        h0 = build_heff(p, ch, 0.0)
        h1 = build_heff(p, ch, 0.21)
        e0 = np.linalg.norm(h0, "fro") ** 2
        e1 = np.linalg.norm(h1, "fro") ** 2
        assert abs(e0 - e1) / e0 < 1e-8

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            leakage_metric(np.eye(3), np.eye(4))


class TestDensityStats:
    @pytest.mark.parametrize("n", [8, 16, 64])
    def test_mirror_permutation_density(self, n):
        assert density_stats(mirror_permutation(n)).density == pytest.approx(1 / n)

    def test_operator_density_odd_k(self):
        # condition (i) zeroes exactly half the cells; v2(5)=0 protects no more
        g = conj_operator(AfdmParams.from_k(64, 5, c2=0.0))
        assert density_stats(g).density == pytest.approx(0.5)

    def test_operator_density_even_k(self):
        g = conj_operator(AfdmParams.from_k(64, 10, c2=0.0))
        assert density_stats(g).density < 0.5

    def test_per_row_max(self):
        s = density_stats(mirror_permutation(16))
        assert s.per_row_max_nnz == 1
        assert s.nnz == 16

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValueError):
            density_stats(np.eye(2), threshold=-1.0)


class TestCompositeStructure:
    def _h_tilde(self, nu_scale, eps, seed=3):
        p = AfdmParams.from_k(64, 5, c2=0.0)
        a = daft_matrix(p)
        iq = ImpairmentParams(psi=0.1, phi=np.deg2rad(8.0))
        rng = np.random.default_rng(seed)
        ch = sample_channel(ChannelConfig(block_len=64, doppler_mode="integer"), rng)
        h = build_heff(p, ch, eps, daft=a)
        return build_composite_channel(h, a @ a.T, iq.mu, nu_scale * iq.nu), ch

    def test_impairments_break_band_structure(self):
        h_tilde, ch = self._h_tilde(nu_scale=1.0, eps=0.3)
        assert density_stats(h_tilde).per_row_max_nnz > 2 * ch.num_paths

    def test_clean_embedding_keeps_band_structure(self):
        h_tilde, ch = self._h_tilde(nu_scale=0.0, eps=0.0)
        assert density_stats(h_tilde).per_row_max_nnz <= 2 * ch.num_paths

    def test_vanishing_image_branch_is_continuous(self):
        # off-band energy must vanish with nu, supporting the claim that
        # mild IQ imbalance approximately preserves sparsity
        tiny, _ = self._h_tilde(nu_scale=1e-6, eps=0.0)
        clean, _ = self._h_tilde(nu_scale=0.0, eps=0.0)
        assert leakage_metric(tiny, clean).leakage < 1e-10


class TestExportImport:
    def test_identity_rows(self, tmp_path):
        path = tmp_path / "eye.csv"
        export_matrix_magnitudes(np.eye(2), str(path))
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# rows=2 cols=2")
        assert lines[1] == "1,0"
        assert lines[2] == "0,1"

    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        m = rng.standard_normal((5, 7)) + 1j * rng.standard_normal((5, 7))
        path = tmp_path / "mat.csv"
        export_matrix_magnitudes(m, str(path), params={"n": 5})
        back = import_matrix_magnitudes(str(path))
        assert back.shape == (5, 7)
        assert np.abs(back - np.abs(m)).max() < 1e-5 * np.abs(m).max()

    def test_write_error_names_path(self, tmp_path):
        bad = tmp_path / "missing_dir" / "x.csv"
        with pytest.raises(OSError, match="missing_dir"):
            export_matrix_magnitudes(np.eye(2), str(bad))
