"""Batch reference computations used to cross-check the streaming estimators.

These functions see the whole data set (or the true distribution) at once and
are meant for validation: exact empirical quantiles, the smoothed distribution
function ``G`` that the smoothed recursion tracks in expectation, and the
martingale/residual decomposition of the averaged estimate.
"""
import logging
import math
import warnings
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .BahadurTerms import BahadurTerms
from .QuantileState import QuantileState
from .ScheduleConfig import ScheduleConfig
from .errors import DomainError, InputError, NumericError
from .score import _ramp

logger = logging.getLogger(__name__)

Cdf = Callable[[np.ndarray], np.ndarray]

QUADRATURE_TOLERANCE = 1e-10

# Gauss-Legendre orders compared by the batch quadrature
LEGENDRE_NODES = (32, 64)


def _sample(data: Sequence[float] | np.ndarray) -> np.ndarray:
    values = np.asarray(data, dtype=float).reshape(-1)
    if values.size == 0:
        raise InputError("data must not be empty", field="data")
    return values


def sample_quantile(data: Sequence[float] | np.ndarray, tau: float) -> float:
    """Lower endpoint of the minimizers of the empirical quantile loss.

    This is the ``ceil(n * tau)``-th order statistic (inverse-CDF convention).

    Raises:
        InputError: If ``data`` is empty
        DomainError: If tau lies outside (0, 1)
    """
    values = _sample(data)
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (0, 1), got {tau}", field="tau")
    return float(np.quantile(values, tau, method="inverted_cdf"))


def empirical_cdf(data: Sequence[float] | np.ndarray, x: float) -> float:
    """Fraction of ``data`` that is less than or equal to ``x``.

    Raises:
        InputError: If ``data`` is empty
    """
    values = _sample(data)
    return float(np.count_nonzero(values <= x) / values.size)


def smoothed_cdf(x: float, width: float, cdf: Cdf) -> float:
    """Expected smoothed score ``G(x) = E g((x - X) / width)`` for X with distribution ``cdf``.

    Integrating by parts turns the expectation into the window average
    ``(2 width)^-1 * int_{x - width}^{x + width} F(u) du``, evaluated by adaptive
    quadrature.

    Raises:
        DomainError: If width is not strictly positive
        NumericError: If the quadrature does not converge
    """
    if not width > 0:
        raise DomainError(f"width must be positive, got {width}", field="width")
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            area, _ = integrate.quad(lambda u: float(cdf(u)), x - width, x + width,
                                     epsabs=QUADRATURE_TOLERANCE)
        except integrate.IntegrationWarning as e:
            raise NumericError(f"quadrature did not converge: {e}", field="cdf") from e
    return area / (2.0 * width)


def smoothed_cdf_batch(x: np.ndarray, width: np.ndarray, cdf: Cdf) -> np.ndarray:
    """Vectorized ``smoothed_cdf`` by fixed-order Gauss-Legendre quadrature.

    ``cdf`` must accept arrays. The estimate at the higher order is returned
    once it agrees with the lower order to within the quadrature tolerance.

    Raises:
        NumericError: If the two orders disagree
    """
    x = np.asarray(x, dtype=float)
    width = np.broadcast_to(np.asarray(width, dtype=float), x.shape)
    if np.any(width <= 0):
        raise DomainError("widths must be positive", field="width")
    estimates = []
    for order in LEGENDRE_NODES:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        values = cdf(x[..., None] + width[..., None] * nodes)
        estimates.append(0.5 * (values * weights).sum(axis=-1))
    error = float(np.max(np.abs(estimates[1] - estimates[0]), initial=0.0))
    if error > 10 * QUADRATURE_TOLERANCE:
        raise NumericError(f"Gauss-Legendre quadrature did not converge (error {error:.3g})", field="cdf")
    return estimates[1]


def sgd_trace(observations: Sequence[float] | np.ndarray, schedule: ScheduleConfig, tau: float,
              initial_value: float = 0.0) -> np.ndarray:
    """Runs the recursion at one level and records the iterate before every update.

    Args:
        observations: n values, or an n x p array of p independent streams
        schedule: Learning-rate schedule
        tau: Quantile level
        initial_value: Starting iterate of every stream

    Returns:
        np.ndarray: Same shape as ``observations``; row k holds Y_k, the iterate
        that update k + 1 starts from (row 0 is the initial value)
    """
    matrix = np.asarray(observations, dtype=float)
    column = matrix.ndim == 1
    matrix = matrix.reshape(matrix.shape[0], -1)
    state = QuantileState.init(matrix.shape[1], [tau], schedule,
                               initial_values=np.full(matrix.shape[1], initial_value))
    trace = np.empty_like(matrix)
    for k, row in enumerate(matrix):
        trace[k] = state.raw[:, 0]
        state.update(row)
    return trace[:, 0] if column else trace


def bahadur_terms(observations: Sequence[float] | np.ndarray, trace: Sequence[float] | np.ndarray,
                  cfg: ScheduleConfig, tau: float, true_quantile: float,
                  true_density_at_quantile: float, cdf: Cdf) -> BahadurTerms:
    """Martingale differences and residual of the averaged estimate at level ``tau``.

    Update k applies the score ``Z_k = tau - g((Y_{k-1} - X_k) / (a gamma_k))``
    whose conditional mean is ``tau - G_k(Y_{k-1})``; ``xi_k`` is their difference.
    The averaged estimate is rebuilt from the trace and decomposed as
    ``Ybar_n - Q = xi_bar / f(Q) + residual``.

    Args:
        observations: The n observations fed to the recursion
        trace: The n pre-update iterates, as returned by ``sgd_trace``
        cfg: Schedule that produced the trace
        tau: Quantile level
        true_quantile: Q(tau)
        true_density_at_quantile: f(Q(tau)), strictly positive
        cdf: Vectorized distribution function of the observations

    Raises:
        InputError: If the trace and the observations differ in length
        NumericError: If the quadrature fails
    """
    x = _sample(observations)
    y = np.asarray(trace, dtype=float).reshape(-1)
    if y.shape != x.shape:
        raise InputError(f"trace has {y.size} entries for {x.size} observations", field="trace")
    if not true_density_at_quantile > 0:
        raise NumericError("density at the quantile must be positive", field="true_density_at_quantile")
    steps = np.arange(1, x.size + 1, dtype=float)
    gammas = cfg.c_gamma * steps ** -cfg.beta
    if cfg.smoothed:
        width = cfg.a * gammas
        score = _ramp((y - x) / width)
        expected = smoothed_cdf_batch(y, width, cdf)
    else:
        score = (y >= x).astype(float)
        expected = np.asarray(cdf(y), dtype=float)
    xi = expected - score
    averaged = float(np.mean(y + gammas * (tau - score)))
    xi_bar = float(xi.mean())
    residual = averaged - true_quantile - xi_bar / true_density_at_quantile
    return BahadurTerms(xi=xi.tolist(), xi_bar=xi_bar, averaged=averaged, residual=residual)


def remainder_rho(y: float, q: float, tau: float, k: int, cfg: ScheduleConfig, cdf: Cdf,
                  density_sup: float, pdf: Optional[Cdf] = None) -> tuple[float, float]:
    """Remainder of the conditional mean score after removing its linear part.

    ``rho = tau - G_k(y) + f(q) (y - q)`` together with the bound
    ``2 a c_f gamma_k + c_f (y - q)^2`` that holds whenever ``c_f`` dominates
    both the density and its derivative.

    Args:
        y: Current iterate
        q: True tau-quantile
        tau: Quantile level
        k: Update index selecting gamma_k
        cfg: Schedule
        cdf: Distribution function
        density_sup: c_f
        pdf: Density; the derivative of ``cdf`` is taken numerically when omitted

    Returns:
        (rho, bound)
    """
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (0, 1), got {tau}", field="tau")
    gamma_k = cfg.gamma(k)
    expected = smoothed_cdf(y, cfg.a * gamma_k, cdf)
    if pdf is not None:
        density = float(pdf(q))
    else:
        step = 1e-5 * max(1.0, abs(q))
        density = float((cdf(q + step) - cdf(q - step)) / (2 * step))
    rho = tau - expected + density * (y - q)
    bound = 2 * cfg.a * density_sup * gamma_k + density_sup * (y - q) ** 2
    if not math.isfinite(rho):
        raise NumericError("remainder is not finite", field="cdf")
    return rho, bound
