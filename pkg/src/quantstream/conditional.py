"""Inference for the streaming local-constant conditional quantile estimator.

The statistic

    max_{i, tau} (n h)^{1/2} (g(x_i) / mu_2(K))^{1/2} f(m(x_i, tau) | x_i) |Zbar_i(tau) - m(x_i, tau)|

is referred to independent Brownian bridges over evaluation points x levels.
"""
from typing import Literal

import numpy as np
from scipy import stats

from .ConditionalState import ConditionalState
from .errors import InputError, NumericError
from .inference import floor_densities, gaussian_kde, silverman_bandwidth

# integral of K(u)^2 for K(u) = 1/2 on [-1, 1]
UNIFORM_KERNEL_MU2 = 0.5


def mu2_uniform() -> float:
    """Returns ``mu_2(K) = int K(u)^2 du = 0.5`` for the uniform kernel."""
    return UNIFORM_KERNEL_MU2


def _positive(name: str, values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise NumericError("densities must be strictly positive", field=name)
    return values


def conditional_statistics(averaged: np.ndarray, null_surface: np.ndarray, cond_sparsity: np.ndarray,
                           design_density: np.ndarray, bandwidth: float, n: int) -> np.ndarray:
    """Statistic of each stream when surfaces carry a leading replication axis."""
    if n < 1:
        raise InputError("at least one observation is required", field="n")
    f = _positive("cond_sparsity", cond_sparsity)
    g = _positive("design_density", design_density)
    scale = np.sqrt(n * bandwidth * g / UNIFORM_KERNEL_MU2)[..., None]
    deviation = scale * f * np.abs(np.asarray(averaged) - np.asarray(null_surface))
    return deviation.max(axis=(-2, -1))


def cond_test_statistic(state: ConditionalState, null_surface: np.ndarray, cond_sparsity: np.ndarray,
                        design_density: np.ndarray, h: float, n: int) -> float:
    """Sup-statistic of ``H0: m(x_i, tau) = null_surface[i][tau]``.

    Args:
        state: Conditional estimator holding the averaged surface
        null_surface: |points| x |grid| conditional quantiles under the null
        cond_sparsity: |points| x |grid| conditional densities f(m(x_i, tau) | x_i)
        design_density: Regressor density g(x_i) at each evaluation point
        h: Kernel bandwidth
        n: Sample size

    Raises:
        NumericError: If a density is not strictly positive
        InputError: On dimension mismatch
    """
    null = np.asarray(null_surface, dtype=float)
    if null.shape != state.averaged.shape:
        raise InputError(f"null surface must have shape {state.averaged.shape}", field="null_surface")
    return float(conditional_statistics(state.averaged, null, cond_sparsity, design_density, h, n))


def estimate_cond_densities(sample: np.ndarray, eval_points, quantile_estimates: np.ndarray,
                            bandwidths: tuple[float, float] | Literal["auto"] = "auto"
                            ) -> tuple[np.ndarray, np.ndarray]:
    """Kernel estimates of g(x_i) and f(m | x_i) from (x, y) pairs.

    The design density is a univariate Gaussian KDE of the regressor; the
    conditional density is a bivariate product-Gaussian KDE at (x_i, m) divided
    by g(x_i). Both are floored at the sparsity floor.

    Args:
        sample: n x 2 array of (x, y) pairs, n >= 2
        eval_points: Evaluation points x_i
        quantile_estimates: |points| x |grid| points m at which f(m | x_i) is evaluated
        bandwidths: (h_x, h_y) or ``"auto"`` for Silverman's rule on each coordinate

    Returns:
        (design_density, cond_sparsity) with shapes (|points|,) and (|points|, |grid|)

    Raises:
        InputError: If fewer than two pairs are given
        NumericError: If a coordinate has no spread
    """
    pairs = np.asarray(sample, dtype=float).reshape(-1, 2)
    if pairs.shape[0] < 2:
        raise InputError("density estimation needs at least two (x, y) pairs", field="sample")
    if not np.all(np.isfinite(pairs)):
        raise InputError("sample must be finite", field="sample")
    x, y = pairs[:, 0], pairs[:, 1]
    if bandwidths == "auto":
        hx, hy = silverman_bandwidth(x), silverman_bandwidth(y)
    else:
        hx, hy = bandwidths
        if not (hx > 0 and hy > 0):
            raise NumericError("bandwidths must be positive", field="bandwidths")
    points = np.asarray(eval_points, dtype=float)
    design = gaussian_kde(x, points, hx)
    weights_x = stats.norm.pdf((points[:, None] - x) / hx) / hx
    m = np.asarray(quantile_estimates, dtype=float)
    weights_y = stats.norm.pdf((m[..., None] - y) / hy) / hy
    joint = (weights_y * weights_x[:, None, :]).mean(axis=-1)
    design = floor_densities(design, "design density")
    return design, floor_densities(joint / design[:, None], "conditional density")
