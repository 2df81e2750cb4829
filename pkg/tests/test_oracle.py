import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from quantstream import BahadurTerms, DomainError, InputError, QuantileState, ScheduleConfig
from quantstream.oracle import (bahadur_terms, empirical_cdf, remainder_rho, sample_quantile,
                                sgd_trace, smoothed_cdf, smoothed_cdf_batch)
from quantstream.score import g, g_scaled


class TestEmpirical:

    @pytest.mark.parametrize("data, tau, expected", [
        ([1.0, 2.0, 3.0], 0.5, 2.0), ([1.0, 2.0, 3.0, 4.0], 0.5, 2.0), ([5.0], 0.3, 5.0),
        ([3.0, 1.0, 2.0], 0.9, 3.0),
    ])
    def test_sample_quantile(self, data, tau, expected):
        assert sample_quantile(data, tau) == expected

    def test_sample_quantile_errors(self):
        with pytest.raises(InputError):
            sample_quantile([], 0.5)
        with pytest.raises(DomainError):
            sample_quantile([1.0], 0.0)

    def test_sample_quantile_monotone_in_tau(self, rng):
        data = rng.standard_normal(501)
        values = [sample_quantile(data, tau) for tau in np.linspace(0.01, 0.99, 50)]
        assert all(a <= b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("data, x, expected", [
        ([1.0, 2.0, 3.0], 2.0, 2 / 3), ([1.0, 2.0, 3.0], 0.5, 0.0), ([1.0, 2.0, 3.0], 3.0, 1.0),
        ([0.0, 0.0, 0.0], 0.0, 1.0),
    ])
    def test_empirical_cdf(self, data, x, expected):
        assert empirical_cdf(data, x) == pytest.approx(expected)


class TestSmoothedCdf:

    def test_symmetric_point(self):
        assert smoothed_cdf(0.0, 0.7, stats.norm.cdf) == pytest.approx(0.5, abs=1e-12)

    def test_narrow_window_recovers_cdf(self):
        assert smoothed_cdf(1.0, 1e-4, stats.norm.cdf) == pytest.approx(stats.norm.cdf(1.0), abs=1e-6)

    def test_matches_smoothed_score_expectation(self):
        rng = np.random.default_rng(12)
        draws = rng.standard_normal(400_000)
        mc = g_scaled(0.3 - draws, 0.5).mean()
        assert smoothed_cdf(0.3, 0.5, stats.norm.cdf) == pytest.approx(mc, abs=5e-3)

    def test_batch_agrees_with_adaptive_quadrature(self, rng):
        x = rng.normal(scale=2.0, size=25)
        width = rng.uniform(0.01, 1.5, size=25)
        batch = smoothed_cdf_batch(x, width, stats.t(10).cdf)
        single = [smoothed_cdf(xi, wi, stats.t(10).cdf) for xi, wi in zip(x, width)]
        np.testing.assert_allclose(batch, single, atol=1e-8)

    def test_invalid_width(self):
        with pytest.raises(DomainError):
            smoothed_cdf(0.0, 0.0, stats.norm.cdf)
        with pytest.raises(DomainError):
            smoothed_cdf_batch(np.zeros(2), np.array([0.1, -0.1]), stats.norm.cdf)


class TestTrace:

    def test_first_entry_is_initial_value(self, rng):
        trace = sgd_trace(rng.standard_normal(10), ScheduleConfig(), 0.5, initial_value=2.0)
        assert trace[0] == 2.0
        assert trace.shape == (10,)

    def test_matches_estimator(self, rng):
        data = rng.standard_normal(60)
        schedule = ScheduleConfig(beta=0.6)
        trace = sgd_trace(data, schedule, 0.3)
        state = QuantileState.init(1, [0.3], schedule)
        for k in range(59):
            state.update([data[k]])
            assert trace[k + 1] == state.raw[0, 0]

    def test_independent_columns(self, rng):
        data = rng.standard_normal((40, 3))
        trace = sgd_trace(data, ScheduleConfig(), 0.5)
        assert trace.shape == (40, 3)
        np.testing.assert_array_equal(trace[:, 1], sgd_trace(data[:, 1], ScheduleConfig(), 0.5))


class TestBahadurTerms:

    def test_score_at_symmetric_median_is_its_own_innovation(self, rng):
        cfg = ScheduleConfig(a=1.5)
        x = rng.standard_normal(200)
        terms = bahadur_terms(x, np.zeros(200), cfg, 0.5, 0.0, stats.norm.pdf(0.0), stats.norm.cdf)
        width = cfg.a * cfg.c_gamma * np.arange(1, 201) ** -cfg.beta
        np.testing.assert_allclose(terms.xi, 0.5 - g(-x / width), atol=1e-12)

    def test_differences_have_zero_mean_across_streams(self, rng):
        cfg = ScheduleConfig(c_gamma=1.5, a=1.2)
        distribution = stats.norm()
        q = distribution.ppf(0.3)
        data = rng.standard_normal((2000, 50))
        traces = sgd_trace(data.T, cfg, 0.3)
        xi = np.array([
            bahadur_terms(data[r], traces[:, r], cfg, 0.3, q, distribution.pdf(q), distribution.cdf).xi
            for r in range(data.shape[0])
        ])
        for k in (0, 9, 49):
            standard_error = xi[:, k].std(ddof=1) / np.sqrt(xi.shape[0])
            assert abs(xi[:, k].mean()) <= 3 * standard_error

    def test_differences_are_bounded(self, rng):
        cfg = ScheduleConfig(c_gamma=2.0)
        x = rng.standard_t(10, 2000)
        trace = sgd_trace(x, cfg, 0.8)
        distribution = stats.t(10)
        q = distribution.ppf(0.8)
        terms = bahadur_terms(x, trace, cfg, 0.8, q, distribution.pdf(q), distribution.cdf)
        assert terms.n == 2000
        assert np.max(np.abs(terms.xi)) <= 1.0
        assert terms.xi_bar == pytest.approx(np.mean(terms.xi))

    def test_averaged_matches_estimator(self, rng):
        cfg = ScheduleConfig()
        x = rng.standard_normal(500)
        terms = bahadur_terms(x, sgd_trace(x, cfg, 0.5), cfg, 0.5, 0.0, stats.norm.pdf(0.0), stats.norm.cdf)
        state = QuantileState.init(1, [0.5], cfg).merge_array(x)
        assert terms.averaged == pytest.approx(state.averaged[0, 0], rel=1e-10, abs=1e-12)
        expected = terms.averaged - terms.xi_bar / stats.norm.pdf(0.0)
        assert terms.residual == pytest.approx(expected)

    def test_plain_score(self, rng):
        cfg = ScheduleConfig(smoothed=False)
        x = rng.standard_normal(100)
        terms = bahadur_terms(x, sgd_trace(x, cfg, 0.5), cfg, 0.5, 0.0, stats.norm.pdf(0.0), stats.norm.cdf)
        assert terms.n == 100

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            bahadur_terms(np.zeros(3), np.zeros(2), ScheduleConfig(), 0.5, 0.0, 0.4, stats.norm.cdf)

    def test_model_rejects_inconsistent_mean(self):
        with pytest.raises(ValidationError):
            BahadurTerms(xi=[0.5, -0.5], xi_bar=0.2, averaged=0.0, residual=0.0)

    def test_model_rejects_large_difference(self):
        with pytest.raises(ValidationError):
            BahadurTerms(xi=[1.5], xi_bar=1.5, averaged=0.0, residual=0.0)


class TestRemainder:

    def test_unit_deviation(self):
        rho, bound = remainder_rho(1.0, 0.0, 0.5, 1, ScheduleConfig(c_gamma=0.1), stats.norm.cdf,
                                   0.4, stats.norm.pdf)
        assert bound == pytest.approx(0.48)
        assert abs(rho) <= bound

    def test_at_quantile_only_smoothing_error_remains(self):
        cfg = ScheduleConfig(c_gamma=0.3)
        rho, bound = remainder_rho(0.0, 0.0, 0.5, 5, cfg, stats.norm.cdf, 0.4, stats.norm.pdf)
        assert bound == pytest.approx(2 * cfg.a * 0.4 * cfg.gamma(5))
        assert abs(rho) <= bound

    @pytest.mark.parametrize("distribution", [stats.norm(), stats.t(10)])
    def test_bound_holds_on_random_configurations(self, distribution):
        rng = np.random.default_rng(21)
        for _ in range(1000):
            tau = float(rng.uniform(0.05, 0.95))
            q = float(distribution.ppf(tau))
            y = q + float(rng.uniform(-2.0, 2.0))
            cfg = ScheduleConfig(c_gamma=float(rng.uniform(0.01, 1.0)), a=float(rng.uniform(0.51, 3.0)))
            rho, bound = remainder_rho(y, q, tau, int(rng.integers(1, 100)), cfg, distribution.cdf,
                                       0.4, distribution.pdf)
            assert abs(rho) <= bound + 1e-8

    def test_numerical_derivative(self):
        cfg = ScheduleConfig(c_gamma=0.2)
        exact, _ = remainder_rho(0.7, 0.25, 0.6, 3, cfg, stats.norm.cdf, 0.4, stats.norm.pdf)
        numeric, _ = remainder_rho(0.7, 0.25, 0.6, 3, cfg, stats.norm.cdf, 0.4)
        assert numeric == pytest.approx(exact, abs=1e-6)

    def test_invalid_tau(self):
        with pytest.raises(DomainError):
            remainder_rho(0.0, 0.0, 1.0, 1, ScheduleConfig(), stats.norm.cdf, 0.4)
