import math

import numpy as np
import pytest
from scipy import integrate

from tlevy.cumulants import cumulant
from tlevy.errors import DomainError
from tlevy.oracle import (MomentVector, TruncatedCdf, convergence_sweep, cumulants_from_moments,
                          cutoff_xi, loglog_slope, moment_vector, normalize, numeric_moment,
                          truncated_pdf)
from tlevy.stable import stable_pdf
from tlevy.truncation import make_model

PI = math.pi


def arctan_c(ell):
    return 1.0 / (2.0 * math.atan(ell) / PI)


class TestNormalize:
    @pytest.mark.parametrize("ell", [1.0, 100.0, 3e4])
    def test_arctan(self, ell):
        assert normalize(make_model(1, 1, ell, "ms")) == pytest.approx(arctan_c(ell), rel=1e-9)

    def test_ms_unit_ell(self):
        assert normalize(make_model(1, 1, 1, "ms")) == pytest.approx(2.0, rel=1e-12)

    def test_ms_hundred(self):
        assert normalize(make_model(1, 1, 100, "ms")) == pytest.approx(1.0064068, abs=1e-7)

    def test_limit(self):
        assert normalize(make_model(1, 1, 1e8, "exp")) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("alpha,fam,h", [(0.5, "exp", None), (1.5, "pexp", 2.0), (1.2, "ms", None)])
    def test_at_least_one(self, alpha, fam, h):
        assert normalize(make_model(alpha, 1, 200, fam, h)) >= 1.0

    def test_exp_cauchy_by_adaptive_quadrature(self):
        ell = 100.0
        f = lambda x: math.exp(-x / ell) / (PI * (1 + x * x))  # noqa: E731
        mass = 2 * sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=500)[0]
                       for a, b in [(0, 1), (1, ell), (ell, 80 * ell)])
        assert normalize(make_model(1, 1, ell, "exp")) == pytest.approx(1 / mass, rel=1e-10)


class TestPdf:
    def test_origin_small_eps(self):
        for fam in ("ms", "exp"):
            assert truncated_pdf(make_model(1, 1, 1e6, fam), 0.0) == pytest.approx(1 / PI, rel=1e-5)

    def test_ms_support(self):
        m = make_model(1.3, 1, 100, "ms")
        assert truncated_pdf(m, 100.5) == 0.0
        assert truncated_pdf(m, -150.0) == 0.0

    def test_exp_composition(self):
        m = make_model(1, 1, 100, "exp")
        ref = normalize(m) / (PI * 2501) * math.exp(-0.5)
        assert truncated_pdf(m, 50.0) == pytest.approx(ref, rel=1e-12)

    def test_even(self):
        m = make_model(0.7, 1, 100, "pexp", 2.0)
        x = np.array([0.5, 5.0, 60.0])
        np.testing.assert_array_equal(truncated_pdf(m, x), truncated_pdf(m, -x))


class TestMoments:
    def test_ms_cauchy_closed_forms(self):
        ell = 1e3
        m = make_model(1, 1, ell, "ms")
        c = arctan_c(ell)
        m2 = c * 2 / PI * (ell - math.atan(ell))
        m4 = c * 2 / PI * (ell ** 3 / 3 - ell + math.atan(ell))
        assert numeric_moment(m, 2) == pytest.approx(m2, rel=1e-10)
        assert numeric_moment(m, 4) == pytest.approx(m4, rel=1e-10)

    def test_ms_variance_near_asymptotic(self):
        assert numeric_moment(make_model(1, 1, 1000, "ms"), 2) == pytest.approx(2000 / PI, rel=5e-3)

    def test_exp_half_fourth(self):
        ell = 1e4
        ref = ell ** 3.5 * (1 / math.sqrt(2 * PI)) * math.gamma(3.5)
        assert numeric_moment(make_model(0.5, 1, ell, "exp"), 4) == pytest.approx(ref, rel=5e-2)

    @pytest.mark.parametrize("alpha", [0.6, 1.5])
    def test_against_adaptive_quadrature(self, alpha):
        m = make_model(alpha, 1, 60, "exp")
        c = normalize(m)
        f = lambda x: x * x * stable_pdf(m.stable, x) * math.exp(-x / 60)  # noqa: E731
        edges = [0, 1, 20, 60, 600, 4000]
        ref = 2 * c * sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=500)[0]
                          for a, b in zip(edges[:-1], edges[1:]))
        assert numeric_moment(m, 2) == pytest.approx(ref, rel=1e-8)

    def test_odd_zero(self):
        m = make_model(1, 1, 100, "exp")
        assert numeric_moment(m, 3) == 0.0 and numeric_moment(m, 1) == 0.0

    def test_positive_even(self):
        mv = moment_vector(make_model(1.3, 1, 300, "pexp", 0.8))
        assert min(mv.m2, mv.m4, mv.m6, mv.m8) > 0

    def test_order_limit(self):
        with pytest.raises(DomainError):
            numeric_moment(make_model(1, 1, 100), 10)

    def test_cutoff(self):
        assert cutoff_xi(make_model(1, 1, 100, "ms").deformation) == 1.0
        xi = cutoff_xi(make_model(1, 1, 100, "exp").deformation)
        assert math.exp(-xi) * xi ** 10 < 1e-16


class TestCumulantsFromMoments:
    def test_gaussian(self):
        assert cumulants_from_moments(MomentVector(1, 3, 15, 1, 0)) == (1, 0, 0)

    def test_scaled_gaussian(self):
        s2 = 2.5
        assert cumulants_from_moments(MomentVector(s2, 3 * s2 ** 2, 15 * s2 ** 3, 1, 0))[1] == 0

    def test_brute_force(self):
        # 9 - 3 = 6 and 225 - 15*9 + 30 = 120
        assert cumulants_from_moments(MomentVector(1, 9, 225, 1, 0)) == (1, 6, 120)

    def test_laplace(self):
        # Laplace(b=1): moments 2, 24, 720; cumulants 2, 12, 240
        k = cumulants_from_moments(MomentVector(2.0, 24.0, 720.0, 1, 0))
        assert k == pytest.approx((2.0, 12.0, 240.0))


class TestSweep:
    def test_exp_cauchy(self):
        reps = convergence_sweep(1.0, "exp", 2, [1e-2, 1e-3, 1e-4])
        errs = [r.rel_error for r in reps]
        assert errs[0] > errs[1] > errs[2]
        assert all(r.rel_error <= 5 * r.epsilon for r in reps)
        for r in reps:
            assert r.rel_error == abs(r.kappa_numeric - r.kappa_asymptotic) / abs(r.kappa_asymptotic)

    def test_ms_cauchy(self):
        (rep,) = convergence_sweep(1.0, "ms", 2, [1e-3])
        assert rep.rel_error <= 5e-3
        assert rep.kappa_asymptotic == cumulant(make_model(1, 1, 1000, "ms"), 2)

    def test_validation(self):
        with pytest.raises(DomainError):
            convergence_sweep(1.0, "exp", 3, [1e-2])
        with pytest.raises(DomainError):
            convergence_sweep(1.0, "exp", 2, [0.5])

    def test_slope_helper(self):
        assert loglog_slope([1, 10, 100], [2, 20, 200]) == pytest.approx(1.0)


class TestCdf:
    def test_ms_cauchy(self):
        m = make_model(1, 1, 50, "ms")
        cdf = TruncatedCdf(m)
        x = np.array([-50.0, -3.0, 0.0, 1e-14, 0.5, 10.0, 49.0, 50.0, 80.0])
        ref = 0.5 + np.sign(x) * np.minimum(np.arctan(np.abs(x)) / PI * arctan_c(50) , 0.5)
        np.testing.assert_allclose(cdf(x), ref, atol=1e-12)

    def test_ppf_inverts(self):
        cdf = TruncatedCdf(make_model(1.5, 1, 30, "exp"))
        u = np.array([1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-6])
        np.testing.assert_allclose(cdf(cdf.ppf(u)), u, atol=1e-7)
