"""Smoothed quantile score and learning-rate schedule.

The smoothed score replaces the indicator ``1{x >= 0}`` of the quantile
subgradient with the ramp

    g(x) = 1            if x >= 1
           (x + 1) / 2  if -1 <= x < 1
           0            if x < -1

and its rescaling ``g_k(x) = g(x / k)``. All functions here are pure and
accept scalars or numpy arrays.
"""
from typing import overload

import numpy as np

from .ScheduleConfig import ScheduleConfig
from .errors import DomainError, require_finite


def _ramp(x: np.ndarray) -> np.ndarray:
    # (x + 1) / 2 clipped to [0, 1] coincides with g on every branch
    return np.clip((x + 1.0) * 0.5, 0.0, 1.0)


@overload
def g(x: float) -> float: ...


@overload
def g(x: np.ndarray) -> np.ndarray: ...


def g(x):
    """Evaluates the piecewise-linear smoothing function.

    Args:
        x: Scalar or array of finite reals

    Returns:
        Value(s) in [0, 1]; a float for scalar input

    Raises:
        DomainError: If any input is NaN or infinite
    """
    require_finite("x", x)
    result = _ramp(np.asarray(x, dtype=float))
    return float(result) if np.ndim(result) == 0 else result


def g_scaled(x, k):
    """Evaluates ``g(x / k)``, which is Lipschitz with constant ``1 / (2k)``.

    Args:
        x: Scalar or array of finite reals
        k: Positive scale

    Raises:
        DomainError: If k is not strictly positive or inputs are not finite
    """
    if not np.isfinite(k) or k <= 0:
        raise DomainError(f"scale must be positive, got {k}", field="k")
    require_finite("x", x)
    return g(np.asarray(x, dtype=float) / k)


def gamma(cfg: ScheduleConfig, k: int) -> float:
    """Returns the learning rate ``c_gamma * k ** -beta`` of the k-th update."""
    return cfg.gamma(k)


def smoothed_increment(iterate: np.ndarray, observation: np.ndarray, levels: np.ndarray,
                       gamma_k: float, width: float) -> np.ndarray:
    """Step ``gamma_k * (tau - g_width(iterate - observation))`` of the smoothed recursion.

    Inputs broadcast against each other; ``observation`` must already carry a
    trailing axis when ``iterate`` holds one column per level.
    """
    return gamma_k * (levels - _ramp((iterate - observation) / width))


def indicator_increment(iterate: np.ndarray, observation: np.ndarray, levels: np.ndarray,
                        gamma_k: float) -> np.ndarray:
    """Step ``gamma_k * (tau - 1{iterate >= observation})`` of the plain SGD recursion."""
    return gamma_k * (levels - (iterate >= observation).astype(float))


def schedule_increment(schedule: ScheduleConfig, step: int, iterate: np.ndarray,
                       observation: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Dispatches to the smoothed or plain increment for update number ``step``."""
    gamma_k = schedule.gamma(step)
    if schedule.smoothed:
        return smoothed_increment(iterate, observation, levels, gamma_k, schedule.a * gamma_k)
    return indicator_increment(iterate, observation, levels, gamma_k)


def running_average(averaged: np.ndarray, iterate: np.ndarray, count: int) -> np.ndarray:
    """Polyak-Ruppert update ``k * avg / (k + 1) + Y / (k + 1)`` with ``k = count - 1``.

    Args:
        averaged: Mean of the first ``count - 1`` iterates
        iterate: The ``count``-th iterate
        count: Number of iterates in the new mean (>= 1)
    """
    previous = count - 1
    return previous * averaged / count + iterate / count
