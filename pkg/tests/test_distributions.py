import numpy as np
import pytest
from scipy import special, stats as sstats

from adaptivedet.distributions import (
    ComplexBeta,
    ComplexChi2,
    ComplexF,
    integrate_adaptive,
    pd_distributed,
    pd_interference,
    pd_point,
    pd_point_generic_aed,
    pfa_point,
    threshold_for_pfa,
)
from adaptivedet.errors import InfeasibleError


class TestComplexChi2:
    def test_unit_exponential(self):
        d = ComplexChi2(1, 0.0)
        ts = np.linspace(0.0, 8.0, 20)
        np.testing.assert_allclose(d.cdf(ts), 1 - np.exp(-ts), atol=1e-13)

    def test_central_is_erlang(self):
        ts = np.linspace(0.0, 20.0, 15)
        for k in (1, 2, 5):
            np.testing.assert_allclose(ComplexChi2(k).cdf(ts),
                                       sstats.gamma(k).cdf(ts), atol=1e-13)

    def test_matches_real_noncentral_convention(self):
        ts = np.linspace(0.1, 30.0, 9)
        mine = ComplexChi2(3, 2.5).cdf(ts)
        ref = sstats.ncx2.cdf(2 * ts, df=6, nc=5.0)
        np.testing.assert_allclose(mine, ref, atol=1e-12)

    def test_sampler_ks(self, rng):
        d = ComplexChi2(3, 2.5)
        samples = d.sample(rng, size=100_000)
        assert sstats.kstest(samples, d.cdf).pvalue > 0.01

    def test_negative_argument_rejected(self):
        with pytest.raises(ValueError):
            ComplexChi2(1).cdf(-0.5)

    def test_sf_complements_cdf(self):
        d = ComplexChi2(4, 7.0)
        ts = np.linspace(0.0, 40.0, 11)
        np.testing.assert_allclose(d.cdf(ts) + d.sf(ts), 1.0, atol=1e-12)


class TestComplexF:
    def test_symmetric_half(self):
        assert abs(ComplexF(1, 1).cdf(1.0) - 0.5) < 1e-12

    def test_central_incomplete_beta(self):
        m, n = 2, 13
        ts = np.linspace(0.01, 5.0, 25)
        ref = special.betainc(m, n, ts / (1 + ts))
        np.testing.assert_allclose(ComplexF(m, n).cdf(ts), ref, atol=1e-10)

    def test_matches_scipy_noncentral_f(self):
        m, n, d = 2, 13, 8.0
        ts = np.linspace(0.05, 8.0, 17)
        ref = special.ncfdtr(2 * m, 2 * n, 2 * d, ts * n / m)
        np.testing.assert_allclose(ComplexF(m, n, d).cdf(ts), ref, atol=1e-12)

    def test_sampler_ks(self, rng):
        d = ComplexF(2, 13, 8.0)
        samples = d.sample(rng, size=100_000)
        assert sstats.kstest(samples, d.cdf).pvalue > 0.01


class TestComplexBeta:
    def test_central_reduction(self):
        xs = np.linspace(0, 1, 21)
        np.testing.assert_allclose(ComplexBeta(13, 10).cdf(xs),
                                   sstats.beta(13, 10).cdf(xs), atol=1e-12)

    def test_boundaries(self):
        d = ComplexBeta(13, 10, 20.0)
        assert d.cdf(0.0) == 0.0
        assert abs(d.cdf(1.0) - 1.0) < 1e-12

    def test_noncentrality_pushes_left(self):
        xs = np.linspace(0.01, 0.99, 30)
        low = ComplexBeta(13, 10, 0.0).cdf(xs)
        high = ComplexBeta(13, 10, 20.0).cdf(xs)
        assert np.all(high >= low - 1e-12)

    def test_matches_flipped_noncentral_beta(self):
        a, b, d = 13, 10, 20.0
        xs = np.linspace(0.02, 0.98, 15)
        y = 1.0 - xs
        ref = 1.0 - special.ncfdtr(2 * b, 2 * a, 2 * d, (a * y) / (b * (1 - y)))
        np.testing.assert_allclose(ComplexBeta(a, b, d).cdf(xs), ref, atol=1e-12)

    def test_pdf_is_cdf_derivative(self):
        d = ComplexBeta(13, 10, 20.0)
        xs = np.linspace(0.05, 0.95, 9)
        h = 1e-6
        num = (d.cdf(xs + h) - d.cdf(xs - h)) / (2 * h)
        # absolute floor: central differences lose all digits in the far tail
        np.testing.assert_allclose(d.pdf(xs), num, rtol=1e-4, atol=1e-6)

    def test_sampler_ks(self, rng):
        d = ComplexBeta(13, 10, 20.0)
        samples = d.sample(rng, size=100_000)
        assert sstats.kstest(samples, d.cdf).pvalue > 0.01


class TestCdfShapeProperties:
    @pytest.mark.parametrize("dist,grid", [
        (ComplexChi2(3, 2.5), np.linspace(0, 40, 1000)),
        (ComplexF(2, 13, 8.0), np.linspace(0, 50, 1000)),
        (ComplexBeta(13, 10, 20.0), np.linspace(0, 1, 1000)),
    ])
    def test_monotone_with_limits(self, dist, grid):
        vals = dist.cdf(grid)
        assert np.all(np.diff(vals) >= -1e-13)
        assert vals[0] <= 1e-12
        assert vals[-1] > 0.99 or isinstance(dist, ComplexBeta)
        if isinstance(dist, ComplexBeta):
            assert abs(vals[-1] - 1.0) < 1e-12


class TestPointCurves:
    N, p, L = 12, 2, 24

    def test_zero_snr_collapses_to_pfa(self):
        for det in ("sglrt", "samf", "srao", "asd", "sabort", "wsabort",
                    "dnsamf", "aed", "smf"):
            eta = threshold_for_pfa(det, self.N, self.p, self.L, 1e-2)
            pd0 = pd_point(det, self.N, self.p, self.L, 0.0, 1.0, eta)
            pfa = pfa_point(det, self.N, self.p, self.L, eta)
            assert abs(pd0 - pfa) < 1e-12

    def test_aed_dual_path(self):
        eta = threshold_for_pfa("aed", self.N, self.p, self.L, 1e-3)
        for rho, c2 in ((10.0, 1.0), (10.0, 0.3), (200.0, 0.7)):
            closed = pd_point("aed", self.N, self.p, self.L, rho, c2, eta)
            generic = pd_point_generic_aed(self.N, self.p, self.L, rho, c2, eta)
            assert abs(closed - generic) < 1e-8

    def test_aed_ignores_mismatch(self):
        eta = 3.0
        vals = [pd_point("aed", self.N, self.p, self.L, 50.0, c2, eta)
                for c2 in (0.0, 0.25, 0.75, 1.0)]
        assert max(vals) - min(vals) == 0.0

    def test_monotone_in_snr_and_mismatch(self):
        for det in ("sglrt", "samf", "asd", "sabort"):
            eta = threshold_for_pfa(det, self.N, self.p, self.L, 1e-3)
            rhos = [1.0, 5.0, 25.0, 125.0]
            pds = [pd_point(det, self.N, self.p, self.L, r, 0.8, eta) for r in rhos]
            assert all(b >= a - 1e-9 for a, b in zip(pds, pds[1:]))
            c2s = [0.0, 0.3, 0.6, 1.0]
            pds = [pd_point(det, self.N, self.p, self.L, 50.0, c, eta) for c in c2s]
            assert all(b >= a - 1e-9 for a, b in zip(pds, pds[1:]))

    def test_smf_threshold_closed_form(self):
        eta = threshold_for_pfa("smf", self.N, 1, self.L, 1e-3)
        assert abs(eta - np.log(1000.0)) < 1e-3 * np.log(1000.0)

    def test_threshold_round_trip(self):
        for det in ("sglrt", "samf", "srao", "asd", "sabort", "wsabort",
                    "dnsamf", "aed", "smf"):
            eta = threshold_for_pfa(det, self.N, self.p, self.L, 1e-3)
            assert abs(pfa_point(det, self.N, self.p, self.L, eta) - 1e-3) <= 1e-3 * 1e-3

    def test_degenerate_threshold(self):
        for det in ("samf", "aed"):
            assert pfa_point(det, self.N, self.p, self.L, 0.0) == 1.0

    def test_quadrature_convergence(self):
        eta = threshold_for_pfa("sglrt", self.N, self.p, self.L, 1e-3)
        a = pd_point("sglrt", self.N, self.p, self.L, 40.0, 0.7, eta, tol=1e-6)
        b = pd_point("sglrt", self.N, self.p, self.L, 40.0, 0.7, eta, tol=5e-7)
        assert abs(a - b) < 1e-6

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            pd_point("nope", 12, 2, 24, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            pd_point("sglrt", 12, 2, 24, 1.0, 1.0, -1.0)
        with pytest.raises(InfeasibleError):
            threshold_for_pfa("sglrt", 12, 2, 24, 1.5)


class TestDistributedCurves:
    def test_k1_reduces_to_point(self):
        N, L = 8, 16
        for rho, c2 in ((10.0, 1.0), (30.0, 0.6)):
            eta = threshold_for_pfa("sglrt", N, 1, L, 1e-2)
            a = pd_distributed("gkglrt", N, 1, L, rho, c2, eta)
            b = pd_point("sglrt", N, 1, L, rho, c2, eta)
            assert abs(a - b) < 1e-6
        eta = threshold_for_pfa("samf", N, 1, L, 1e-2)
        a = pd_distributed("gamf", N, 1, L, 20.0, 1.0, eta)
        b = pd_point("samf", N, 1, L, 20.0, 1.0, eta)
        assert abs(a - b) < 1e-6

    def test_zero_snr_is_central(self):
        val = pd_distributed("gkglrt", 8, 4, 16, 0.0, 1.0, 1.0)
        ref = pd_distributed("gkglrt", 8, 4, 16, 0.0, 0.2, 1.0)
        assert abs(val - ref) < 1e-12


class TestInterferenceCurves:
    def test_q0_reduces_to_point(self):
        N, p, L = 12, 2, 24
        rho, c2 = 40.0, 0.7
        pairs = (("glrt_he_i", "sglrt"), ("ts_glrt_he_i", "samf"), ("glrt_phe_i", "asd"))
        for det_i, det_p in pairs:
            eta = threshold_for_pfa(det_p, N, p, L, 1e-3)
            a = pd_interference(det_i, N, p, 0, L, rho * c2, rho * (1 - c2), eta)
            b = pd_point(det_p, N, p, L, rho, c2, eta)
            assert abs(a - b) < 1e-9

    def test_zero_noncentralities_are_central(self):
        # the GLRT's conditional threshold map is constant in the loss factor,
        # so at zero effective SNR its PD equals the central false-alarm rate
        # regardless of the rejected-energy noncentrality
        a = pd_interference("glrt_he_i", 12, 2, 3, 24, 0.0, 0.0, 0.8)
        b = pd_interference("glrt_he_i", 12, 2, 3, 24, 0.0, 5.0, 0.8)
        assert 0.0 < a < 1.0
        assert abs(a - b) < 1e-9

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            pd_interference("glrt_he_i", 6, 3, 3, 12, 1.0, 1.0, 0.5)


class TestIntegrator:
    def test_polynomial_exact(self):
        val = integrate_adaptive(lambda x: 3 * x ** 2, 0.0, 1.0)
        assert abs(val - 1.0) < 1e-12

    def test_kink_with_breakpoint(self):
        f = lambda x: np.where(x < 0.3, 0.0, x - 0.3)
        val = integrate_adaptive(f, 0.0, 1.0, breakpoints=(0.3,))
        assert abs(val - 0.5 * 0.7 ** 2) < 1e-9
