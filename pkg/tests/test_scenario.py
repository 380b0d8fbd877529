import numpy as np
import pytest

from adaptivedet import linalg, scenario as sc
from adaptivedet.errors import GeometryError, RankError


class TestCovariance:
    def test_ar1_zero_is_identity(self):
        np.testing.assert_allclose(sc.build_covariance(sc.CovarianceModel.ar1(0.0), 4),
                                   np.eye(4))

    def test_ar1_entries(self):
        R = sc.build_covariance(sc.CovarianceModel.ar1(0.9), 3)
        expected = np.array([[1, 0.9, 0.81], [0.9, 1, 0.9], [0.81, 0.9, 1]])
        np.testing.assert_allclose(R, expected)

    def test_clutter_plus_white_floor(self):
        R = sc.build_covariance(sc.CovarianceModel.ar1_plus_white(0.99, 30.0), 8)
        assert np.linalg.eigvalsh(R).min() >= 1.0

    def test_bad_correlation(self):
        with pytest.raises(ValueError):
            sc.CovarianceModel.ar1(1.0)

    def test_parse_labels_roundtrip(self):
        for text in ("identity", "ar1:0.9", "ar1w:0.99:30"):
            assert sc.CovarianceModel.parse(text).label() == text


class TestSubspace:
    def test_zero_frequency_is_ones(self):
        H = sc.nominal_subspace(5, 1, [0.0])
        np.testing.assert_allclose(H[:, 0], np.ones(5))

    def test_quarter_frequency(self):
        H = sc.nominal_subspace(4, 1, [0.25])
        np.testing.assert_allclose(H[:, 0], [1, 1j, -1, -1j], atol=1e-14)

    def test_vandermonde_rank(self):
        H = sc.nominal_subspace(12, 2, [0.1, 0.3])
        assert np.linalg.matrix_rank(H) == 2

    def test_duplicate_frequencies(self):
        with pytest.raises(RankError):
            sc.nominal_subspace(6, 2, [0.2, 0.2])

    def test_default_geometry_disjoint(self):
        H, J = sc.default_geometry(12, 2, 3)
        assert H.shape == (12, 2) and J.shape == (12, 3)
        linalg.orthonormal_basis(np.concatenate([H, J], axis=1))


class TestActualSignal:
    def setup_method(self):
        g = np.random.default_rng(7)
        A = (g.standard_normal((6, 9)) + 1j * g.standard_normal((6, 9))) / np.sqrt(2)
        self.R = A @ A.conj().T
        self.H = sc.nominal_subspace(6, 2, [0.1, 0.4])

    def _check(self, spec):
        s0 = sc.actual_signal(self.H, self.R, spec)
        Ri = np.linalg.inv(self.R)
        rho_hat = float(np.real(s0.conj() @ Ri @ s0))
        num = s0.conj() @ Ri @ self.H @ np.linalg.solve(
            self.H.conj().T @ Ri @ self.H, self.H.conj().T @ Ri @ s0)
        cos2_hat = float(np.real(num)) / rho_hat
        assert abs(rho_hat - spec.rho) <= 1e-9 * spec.rho
        assert abs(cos2_hat - spec.cos2phi) <= 1e-9
        return s0

    def test_matched_in_subspace(self):
        s0 = self._check(sc.SignalSpec(snr_db=12.0, cos2phi=1.0, seed=5))
        T = linalg.inv_sqrt(self.R)
        P = linalg.ortho_projector(T @ self.H)
        resid = (np.eye(6) - P) @ (T @ s0)
        assert np.linalg.norm(resid) < 1e-9 * np.linalg.norm(T @ s0)

    def test_orthogonal_case(self):
        s0 = self._check(sc.SignalSpec(snr_db=12.0, cos2phi=0.0, seed=5))
        proj = self.H.conj().T @ np.linalg.solve(self.R, s0)
        assert np.linalg.norm(proj) < 1e-9 * np.linalg.norm(s0)

    def test_direct_formula_oracle(self):
        self._check(sc.SignalSpec(snr_db=7.0, cos2phi=0.37, seed=9))

    def test_positive_homogeneity(self):
        a = sc.actual_signal(self.H, self.R, sc.SignalSpec(snr_db=10.0, cos2phi=0.5, seed=3))
        b = sc.actual_signal(self.H, self.R, sc.SignalSpec(snr_db=10.0 + 10 * np.log10(2),
                                                           cos2phi=0.5, seed=3))
        np.testing.assert_allclose(b, np.sqrt(2.0) * a, rtol=1e-9)

    def test_no_orthocomplement(self):
        H_full = sc.nominal_subspace(3, 3, [0.1, 0.4, 0.7])
        with pytest.raises(GeometryError):
            sc.actual_signal(H_full, np.eye(3), sc.SignalSpec(snr_db=0.0, cos2phi=0.5))


class TestSynthesize:
    def setup_method(self):
        self.cfg = sc.ScenarioConfig(N=4, p=1, L=8, pfa=1e-2)
        self.model = sc.CovarianceModel.ar1(0.9)

    def test_same_seed_bit_identical(self):
        a = sc.synthesize(self.cfg, self.model, hypothesis="h0", seed=44)
        b = sc.synthesize(self.cfg, self.model, hypothesis="h0", seed=44)
        assert np.array_equal(a.test, b.test)
        assert np.array_equal(a.training, b.training)
        assert np.array_equal(a.scm, b.scm)

    def test_scm_matches_training(self):
        d = sc.synthesize(self.cfg, self.model, hypothesis="h0", seed=1)
        np.testing.assert_allclose(d.scm, d.training @ d.training.conj().T, rtol=1e-12)

    def test_insufficient_training(self):
        with pytest.raises(ValueError):
            sc.ScenarioConfig(N=4, p=1, L=3, pfa=1e-2)

    def test_h0_moments(self):
        R = sc.build_covariance(self.model, 4)
        A = linalg.herm_sqrt(R)
        rng = np.random.default_rng(10)
        n = 100_000
        w = (rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))) / np.sqrt(2)
        x = w @ A.T  # rows ~ CN(0, R) since A is symmetric under transpose-conj pairing
        entry = x[:, 1]
        assert abs(entry.mean()) < 4 / np.sqrt(n)
        var = np.mean(np.abs(entry) ** 2)
        assert abs(var - R[1, 1].real) < 0.02 * R[1, 1].real

    def test_h1_mean_envelope(self):
        rng = np.random.default_rng(3)
        s0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        n = 100_000
        # vectorized re-draw of the synthesize noise model for H1 means
        R = sc.build_covariance(self.model, 4)
        A = linalg.herm_sqrt(R)
        w = (rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))) / np.sqrt(2)
        acc = (w @ A.T + s0).mean(axis=0)
        sigma = np.sqrt(np.diag(R).real / n)
        assert np.all(np.abs(acc - s0) < 4 * sigma * np.sqrt(2))

    def test_he_empirical_covariance(self):
        R = sc.build_covariance(self.model, 4)
        A = linalg.herm_sqrt(R)
        rng = np.random.default_rng(8)
        n = 100_000
        w = (rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))) / np.sqrt(2)
        x = w @ A.T
        Rhat = (x[:, :, None] * x.conj()[:, None, :]).mean(axis=0)
        assert np.linalg.norm(Rhat - R) < 0.03 * np.linalg.norm(R)

    def test_phe_power_ratio(self):
        cfg = sc.ScenarioConfig(N=4, p=1, L=8, environment="phe", sigma2=2.0, pfa=1e-2)
        d = [sc.synthesize(cfg, self.model, hypothesis="h0", seed=s) for s in range(2000)]
        test_p = np.mean([np.mean(np.abs(x.test) ** 2) for x in d])
        train_p = np.mean([np.mean(np.abs(x.training) ** 2) for x in d])
        assert abs(test_p / train_p - 2.0) < 0.05 * 2.0

    def test_h1_means_added_only_under_h1(self):
        s0 = np.ones(4, dtype=complex)
        h0 = sc.synthesize(self.cfg, self.model, signal=s0, hypothesis="h0", seed=2)
        h1 = sc.synthesize(self.cfg, self.model, signal=s0, hypothesis="h1", seed=2)
        np.testing.assert_allclose(h1.test - h0.test, s0[:, None], atol=1e-12)
