import math

import numpy as np
import pytest
from scipy import stats

from tlevy.errors import DomainError
from tlevy.montecarlo import (WalkConfig, acceptance_rate, diffusion_fit, moment_stats,
                              return_scaling_check, run_ensemble, run_walks, scaling_collapse_ks,
                              truncated_sample, truncated_samples)
from tlevy.oracle import TruncatedCdf, normalize, numeric_moment
from tlevy.truncation import make_model

PI = math.pi


class TestConfig:
    def test_walker_floor(self):
        with pytest.raises(DomainError):
            WalkConfig(make_model(1, 1, 100), 10, 10, 1)

    def test_record_range(self):
        with pytest.raises(DomainError):
            WalkConfig(make_model(1, 1, 100), 10, 100, 1, (0, 5))
        with pytest.raises(DomainError):
            WalkConfig(make_model(1, 1, 100), 10, 100, 1, (5, 11))

    def test_record_sorted(self):
        cfg = WalkConfig(make_model(1, 1, 100), 10, 100, 1, (10, 2, 2))
        assert cfg.record_steps == (2, 10)
        assert WalkConfig(make_model(1, 1, 100), 7, 100, 1).record_steps == (7,)

    def test_seed(self):
        with pytest.raises(DomainError):
            WalkConfig(make_model(1, 1, 100), 10, 100, -3)


class TestSampler:
    def test_single_draw(self):
        m = make_model(1, 1, 100, "ms")
        rng = np.random.default_rng(0)
        xs = [truncated_sample(m, rng) for _ in range(2000)]
        assert max(abs(x) for x in xs) <= 100

    def test_ms_support(self):
        m = make_model(1.7, 1, 3, "ms")
        x = truncated_samples(m, np.random.default_rng(1), 100_000)
        assert np.all(np.abs(x) <= 3)

    def test_acceptance_rate_matches_arctan(self):
        m = make_model(1, 1, 100, "ms")
        target = 2 * math.atan(100) / PI
        assert target == pytest.approx(0.993634, abs=1e-6)
        p, se = acceptance_rate(m, np.random.default_rng(2), 1_000_000)
        assert abs(p - target) <= 3 * se

    def test_second_moment(self):
        m = make_model(1, 1, 100, "exp")
        x = truncated_samples(m, np.random.default_rng(3), 1_000_000)
        sq = x * x
        assert abs(sq.mean() - numeric_moment(m, 2)) <= 3 * sq.std() / math.sqrt(x.size)

    def test_against_tabulated_cdf(self):
        # exact sampler versus inverse-CDF draws from the quadrature CDF
        m = make_model(1, 1, 100, "exp")
        cdf = TruncatedCdf(m)
        crit = 1.628 * math.sqrt(2 / 100_000)
        passed = 0
        for seed in range(100):
            rng = np.random.default_rng([seed, 1])
            a = truncated_samples(m, rng, 100_000)
            b = cdf.sample(rng, 100_000)
            passed += stats.ks_2samp(a, b).statistic < crit
        assert passed >= 95


class TestEstimators:
    def test_moment_stats_laplace(self):
        x = np.random.default_rng(4).laplace(size=200_000)
        m2, se2, k, sek = moment_stats(x)
        assert abs(m2 - 2.0) <= 3 * se2
        assert abs(k - 3.0) <= 3 * sek

    def test_moment_stats_se_calibrated(self):
        rng = np.random.default_rng(5)
        z = []
        for _ in range(200):
            m2, se2, k, sek = moment_stats(rng.uniform(-1.0, 1.0, size=5000))
            z.append((k + 1.2) / sek)
        assert abs(np.mean(z)) < 0.3 and 0.8 < np.std(z) < 1.2

    def test_diffusion_fit_gaussian(self):
        rng = np.random.default_rng(6)
        walks = np.cumsum(rng.standard_normal((50, 20_000)) * 1.5, axis=0)
        rec = [1, 5, 10, 25, 50]
        fit = diffusion_fit(rec, walks[np.array(rec) - 1])
        assert abs(fit.slope - 2.25) <= 3 * fit.slope_se
        assert fit.r_squared > 0.999


class TestEnsemble:
    CFG = WalkConfig(make_model(1.5, 1, 30, "exp"), 16, 20_000, 17, (1, 4, 16))

    def test_deterministic(self):
        a, b = run_ensemble(self.CFG), run_ensemble(self.CFG)
        for col in a.COLUMNS:
            np.testing.assert_array_equal(getattr(a, col), getattr(b, col))

    def test_backend_independent(self):
        a = run_ensemble(self.CFG, "numba")
        b = run_ensemble(self.CFG, "numpy")
        np.testing.assert_allclose(a.variance, b.variance, rtol=1e-12)

    def test_counts(self):
        st = run_ensemble(self.CFG)
        assert list(st.count) == [20_000] * 3
        assert list(st.n) == [1, 4, 16]

    def test_symmetry(self):
        st = run_ensemble(self.CFG)
        assert np.all(np.abs(st.mean) <= 3 * st.mean_se)

    def test_single_step_variance(self):
        cfg = WalkConfig(make_model(1, 1, 100, "exp"), 1, 200_000, 23)
        st = run_ensemble(cfg)
        assert abs(st.variance[0] - numeric_moment(cfg.model, 2)) <= 3 * st.variance_se[0]

    def test_custom_family_uses_numpy_path(self):
        g = lambda x: math.exp(-x * x)  # noqa: E731
        custom = make_model(1.2, 1, 20, "custom", evaluator=g)
        named = make_model(1.2, 1, 20, "pexp", 2.0)
        a = run_walks(WalkConfig(custom, 3, 100, 9, (3,)))
        b = run_walks(WalkConfig(named, 3, 100, 9, (3,)), "numpy")
        np.testing.assert_allclose(a, b, rtol=1e-12)


class TestReturns:
    def test_guard_names_steps(self):
        cfg = WalkConfig(make_model(1, 1, 100, "exp"), 20, 100, 1, (1, 5, 20))
        with pytest.raises(DomainError, match=r"\[20\]"):
            return_scaling_check(cfg)

    def test_alpha_15_ms(self):
        m = make_model(1.5, 1, 100, "ms")
        cfg = WalkConfig(m, 8, 200_000, 31, (1, 2, 4, 8))
        target = math.gamma(2 / 3) / (1.5 * PI)
        for row in return_scaling_check(cfg):
            assert abs(row.scaled - target) <= 3 * row.se, row

    def test_collapse_single_seed(self):
        res = scaling_collapse_ks(make_model(1, 1, 1000, "exp"), 3, 20_000, 3)
        assert res.pvalue > 0.01
