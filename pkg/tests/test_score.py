import warnings

import numpy as np
import pytest
from pydantic import ValidationError

from quantstream import DomainError, QuantileState, QuantStreamWarning, ScheduleConfig
from quantstream.score import (g, g_scaled, gamma, indicator_increment, running_average,
                               smoothed_increment)


class TestSmoothingFunction:

    @pytest.mark.parametrize("x, expected", [
        (1.5, 1.0), (1.0, 1.0), (0.0, 0.5), (0.5, 0.75), (-1.0, 0.0), (-3.0, 0.0),
    ])
    def test_piecewise_values(self, x, expected):
        assert g(x) == expected

    def test_scalar_in_scalar_out(self):
        assert isinstance(g(0.2), float)

    def test_array_input(self):
        np.testing.assert_array_equal(g(np.array([-2.0, 0.0, 2.0])), [0.0, 0.5, 1.0])

    @pytest.mark.parametrize("x", [np.nan, np.inf, -np.inf])
    def test_non_finite_rejected(self, x):
        with pytest.raises(DomainError):
            g(x)

    def test_monotone_and_bounded(self, rng):
        x = np.sort(rng.uniform(-5, 5, size=10_000))
        values = g(x)
        assert np.all(np.diff(values) >= 0)
        assert values.min() >= 0.0 and values.max() <= 1.0

    def test_symmetry_inside_window(self, rng):
        x = rng.uniform(-1, 1, size=1000)
        np.testing.assert_allclose(g(x), 1.0 - g(-x), atol=1e-15)


class TestScaledSmoothing:

    @pytest.mark.parametrize("x, k, expected", [(0.5, 0.5, 1.0), (0.0, 2.0, 0.5), (-0.25, 0.5, 0.25)])
    def test_values(self, x, k, expected):
        assert g_scaled(x, k) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("k", [0.0, -1.0, np.nan])
    def test_invalid_scale(self, k):
        with pytest.raises(DomainError):
            g_scaled(0.1, k)

    def test_lipschitz_constant(self, rng):
        x = rng.uniform(-3, 3, size=5000)
        y = rng.uniform(-3, 3, size=5000)
        k = rng.uniform(0.01, 5, size=5000)
        lhs = np.abs(g_scaled(x, 1.0) - g_scaled(y, 1.0))
        assert np.all(lhs <= np.abs(x - y) / 2 + 1e-15)
        for xi, yi, ki in zip(x[:200], y[:200], k[:200]):
            assert abs(g_scaled(xi, ki) - g_scaled(yi, ki)) <= abs(xi - yi) / (2 * ki) + 1e-15


class TestSchedule:

    def test_first_step_is_scale(self):
        assert gamma(ScheduleConfig(), 1) == 1.0
        assert gamma(ScheduleConfig(c_gamma=0.5), 1) == 0.5

    def test_hundredth_step(self):
        assert gamma(ScheduleConfig(beta=0.7), 100) == pytest.approx(0.0398, abs=1e-4)

    def test_strictly_decreasing(self):
        cfg = ScheduleConfig(c_gamma=2.0, beta=0.6)
        values = [cfg.gamma(k) for k in range(1, 500)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_zero_step_rejected(self):
        with pytest.raises(DomainError):
            gamma(ScheduleConfig(), 0)

    def test_smoothing_width(self):
        cfg = ScheduleConfig(a=2.0)
        assert cfg.smoothing_width(4) == pytest.approx(2.0 * 4 ** -0.7)

    @pytest.mark.parametrize("fields", [
        {"beta": 0.5}, {"beta": 1.0}, {"a": 0.5}, {"c_gamma": 0.0}, {"c_gamma": -1.0}, {"unknown": 1},
    ])
    def test_invalid_configurations(self, fields):
        with pytest.raises(ValidationError):
            ScheduleConfig(**fields)

    def test_beta_above_bahadur_limit_is_flagged_on_init(self):
        cfg = ScheduleConfig(beta=0.85)
        assert not cfg.satisfies_bahadur_condition
        with pytest.warns(QuantStreamWarning):
            QuantileState.init(1, [0.5], cfg)

    def test_revalidation_does_not_warn_again(self):
        with pytest.warns(QuantStreamWarning):
            state = QuantileState.init(2, [0.25, 0.75], ScheduleConfig(beta=0.9))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            restored = QuantileState.from_json(state.to_json())
            ScheduleConfig.model_validate(restored.schedule.model_dump())
        assert restored.schedule.beta == 0.9

    def test_beta_inside_limit_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            cfg = ScheduleConfig(beta=0.7)
            QuantileState.init(1, [0.5], cfg)
            assert cfg.satisfies_bahadur_condition


class TestIncrements:

    def test_smoothed_increment_bounded_by_step(self, rng):
        iterate = rng.normal(size=(50, 9))
        observation = rng.normal(size=(50, 1))
        levels = np.linspace(0.1, 0.9, 9)
        step = smoothed_increment(iterate, observation, levels, 0.3, 0.3)
        assert np.all(np.abs(step) <= 0.3)

    def test_indicator_increment(self):
        step = indicator_increment(np.array([0.0, 2.0]), 1.0, np.array([0.5, 0.5]), 1.0)
        np.testing.assert_array_equal(step, [0.5, -0.5])

    def test_running_average_matches_mean(self, rng):
        values = rng.normal(size=40)
        average = 0.0
        for count, value in enumerate(values, start=1):
            average = running_average(average, value, count)
        assert average == pytest.approx(values.mean(), rel=1e-12)
