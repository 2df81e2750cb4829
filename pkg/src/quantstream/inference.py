"""Simultaneous inference for streaming quantile estimates.

The sup-statistic ``max_{i, tau} sqrt(n) f_i(Q_i(tau)) |Ybar_i(tau) - Q_i(tau)|``
is compared with the (1 - alpha)-quantile of ``max |B_i(tau)|``, where B is a
centered Gaussian process over series x levels (independent Brownian bridges
for i.i.d. series). Inverting the test gives uniform confidence bands.
"""
import logging
import math
from typing import Iterator, Literal, Sequence

import numpy as np
from scipy import linalg, stats

from .Band import Band
from .BridgeSpec import BridgeSpec
from .InferenceReport import InferenceReport
from .QuantileGrid import QuantileGrid
from .QuantileState import QuantileState
from .SparsityEstimate import SparsityEstimate
from .SparsityMode import SparsityMode
from .errors import DomainError, InputError, NumericError, warn

logger = logging.getLogger(__name__)

# Densities below this value are floored before they enter a statistic or a band
SPARSITY_FLOOR = 1e-6

# Relative size of the most negative eigenvalue tolerated when clipping an indefinite matrix
PSD_TOLERANCE = 1e-8

# Draws generated per independently seeded block; fixes the output independently of scheduling
CHUNK_SIZE = 8192

DEFAULT_REPLICATIONS = 100_000


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", field="alpha")


def _sparsity_values(sparsity: SparsityEstimate | np.ndarray) -> np.ndarray:
    if isinstance(sparsity, SparsityEstimate):
        return sparsity.values
    values = np.asarray(sparsity, dtype=float)
    if values.ndim == 1:
        values = values[None, :]
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise NumericError("sparsity values must be strictly positive", field="sparsity")
    return values


def series_statistics(averaged: np.ndarray, null_quantiles: np.ndarray,
                      sparsity: SparsityEstimate | np.ndarray, n: int) -> np.ndarray:
    """Per-series maxima ``sqrt(n) * max_tau f * |Ybar - Q|``.

    Args:
        averaged: p x |grid| averaged estimates
        null_quantiles: p x |grid| quantiles under the null (or a single row, broadcast)
        sparsity: Densities at the quantiles, broadcastable to p x |grid|
        n: Number of observations behind the estimates

    Raises:
        InputError: If the shapes do not broadcast to p x |grid| or n < 1
    """
    if n < 1:
        raise InputError("at least one observation is required", field="n")
    averaged = np.asarray(averaged, dtype=float)
    null = np.asarray(null_quantiles, dtype=float)
    values = _sparsity_values(sparsity)
    try:
        deviation = values * np.abs(averaged - null)
    except ValueError as e:
        raise InputError(f"dimension mismatch: {e}", field="null_quantiles") from e
    if deviation.shape != averaged.shape:
        raise InputError(f"dimension mismatch: expected {averaged.shape}, got {deviation.shape}",
                         field="null_quantiles")
    return math.sqrt(n) * deviation.max(axis=1)


def test_statistic(state: QuantileState, null_quantiles: np.ndarray,
                   sparsity: SparsityEstimate | np.ndarray) -> float:
    """Sup-statistic of the null hypothesis ``Q_i(tau) = null_quantiles[i][tau]``.

    Returns:
        float: ``max_{i, tau} sqrt(n) * f_i(Q_i(tau)) * |Ybar_i(tau) - Q_i(tau)|``

    Raises:
        InputError: On dimension mismatch or when no observation has been consumed
        NumericError: If a sparsity value is not strictly positive
    """
    null = np.asarray(null_quantiles, dtype=float)
    if null.shape != state.averaged.shape:
        raise InputError(f"null quantiles must have shape {state.averaged.shape}, got {null.shape}",
                         field="null_quantiles")
    return float(series_statistics(state.averaged, null, sparsity, state.step).max())


# not a pytest test function
test_statistic.__test__ = False


def bridge_covariance(t: float, s: float) -> float:
    """Covariance ``min(s, t) * (1 - max(s, t))`` of a Brownian bridge.

    Raises:
        DomainError: If t or s lies outside (0, 1)
    """
    for name, value in (("t", t), ("s", s)):
        if not 0.0 < value < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {value}", field=name)
    return min(s, t) * (1.0 - max(s, t))


def independent_bridges_spec(grid: QuantileGrid, series_count: int = 1,
                             replications: int = DEFAULT_REPLICATIONS, seed: int = 0) -> BridgeSpec:
    """Describes ``series_count`` independent Brownian bridges observed on ``grid``."""

    def covariance(i: int, t: float, j: int, s: float) -> float:
        return bridge_covariance(t, s) if i == j else 0.0

    return BridgeSpec(grid=grid, series_count=series_count, covariance=covariance,
                      replications=replications, seed=seed, independent_bridges=True)


def sampling_factor(spec: BridgeSpec) -> np.ndarray:
    """Returns L with ``L @ L.T`` equal to the covariance matrix of ``spec``.

    Uses a Cholesky factorization and falls back to an eigendecomposition with
    negative eigenvalues clipped at zero when the matrix is only semi-definite.

    Raises:
        NumericError: If the most negative eigenvalue is below
            ``-PSD_TOLERANCE * max eigenvalue``
    """
    matrix = spec.covariance_matrix()
    try:
        return linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        eigenvalues, eigenvectors = linalg.eigh(matrix)
        largest = max(float(eigenvalues.max()), 0.0)
        smallest = float(eigenvalues.min())
        if smallest < -PSD_TOLERANCE * largest:
            raise NumericError(
                f"covariance matrix is not positive semi-definite (eigenvalue {smallest:.3g})",
                field="covariance"
            )
        warn("covariance matrix is singular; sampling from its clipped eigendecomposition",
             smallest_eigenvalue=smallest)
        return eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))


def _gaussian_chunks(spec: BridgeSpec) -> Iterator[np.ndarray]:
    factor = sampling_factor(spec)
    chunk_count = math.ceil(spec.replications / CHUNK_SIZE)
    seeds = np.random.SeedSequence(spec.seed).spawn(chunk_count)
    remaining = spec.replications
    for seed in seeds:
        size = min(CHUNK_SIZE, remaining)
        remaining -= size
        rng = np.random.default_rng(seed)
        yield rng.standard_normal((size, spec.dimension)) @ factor.T


def draw_gaussian_process(spec: BridgeSpec) -> np.ndarray:
    """Draws ``spec.replications`` samples of the process, shaped reps x p x |grid|."""
    draws = np.concatenate(list(_gaussian_chunks(spec)), axis=0)
    return draws.reshape(spec.replications, spec.series_count, len(spec.grid))


def simulate_bridge_maxima(spec: BridgeSpec) -> np.ndarray:
    """Draws the reference sample of ``max_{i, tau} |B_i(tau)|``.

    Draws are produced in fixed-size blocks, each with its own child seed of
    ``spec.seed``, so the sample is identical however the blocks are scheduled.
    """
    maxima = np.concatenate([np.abs(chunk).max(axis=1) for chunk in _gaussian_chunks(spec)])
    logger.info("Simulated %d Gaussian maxima over %d coordinates", maxima.size, spec.dimension)
    return maxima


def critical_value_from_sample(maxima: np.ndarray, alpha: float) -> float:
    """Empirical (1 - alpha)-quantile (inverse-CDF convention) of a sample of maxima."""
    _check_alpha(alpha)
    return float(np.quantile(maxima, 1.0 - alpha, method="inverted_cdf"))


def simulate_critical_value(spec: BridgeSpec, alpha: float) -> float:
    """Simulated (1 - alpha)-quantile of ``max |B|`` under ``spec``; deterministic given the seed.

    Raises:
        DomainError: If alpha lies outside (0, 1)
        NumericError: If the covariance matrix is not positive semi-definite
    """
    _check_alpha(alpha)
    return critical_value_from_sample(simulate_bridge_maxima(spec), alpha)


def silverman_bandwidth(sample: np.ndarray) -> float:
    """Silverman's rule ``1.06 * min(sd, IQR / 1.34) * m ** (-1/5)``.

    Falls back to the standard deviation when the interquartile range is zero.

    Raises:
        NumericError: If the sample has no spread (zero bandwidth)
    """
    sample = np.asarray(sample, dtype=float)
    sd = float(np.std(sample, ddof=1))
    q75, q25 = np.percentile(sample, [75, 25])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    if not spread > 0:
        raise NumericError("sample has zero spread, bandwidth would be zero", field="bandwidth")
    return 1.06 * spread * sample.size ** -0.2


def gaussian_kde(sample: np.ndarray, points: np.ndarray, bandwidth: float) -> np.ndarray:
    """Gaussian kernel density estimate ``(m h)^-1 sum_j phi((q - X_j) / h)`` at each point."""
    sample = np.asarray(sample, dtype=float)
    points = np.asarray(points, dtype=float)
    kernel = stats.norm.pdf((points[..., None] - sample) / bandwidth)
    return kernel.mean(axis=-1) / bandwidth


def floor_densities(values: np.ndarray, what: str = "sparsity") -> np.ndarray:
    """Floors densities at SPARSITY_FLOOR, warning when a value had to be raised."""
    values = np.asarray(values, dtype=float)
    floored = values < SPARSITY_FLOOR
    if np.any(floored):
        warn(f"{what} estimate floored at {SPARSITY_FLOOR:g}", count=int(floored.sum()))
        values = np.where(floored, SPARSITY_FLOOR, values)
    return values


def estimate_sparsity_kde(sample: Sequence[float] | np.ndarray, quantile_points: Sequence[float] | np.ndarray,
                          bandwidth: float | Literal["auto"] = "auto") -> np.ndarray:
    """Kernel estimate of the density at each quantile point.

    Args:
        sample: At least two finite observations
        quantile_points: Points at which the density is evaluated
        bandwidth: Positive bandwidth or ``"auto"`` for Silverman's rule

    Returns:
        np.ndarray: Densities floored at SPARSITY_FLOOR

    Raises:
        InputError: If the sample has fewer than two values or is not finite
        NumericError: If the automatic bandwidth is zero
        DomainError: If an explicit bandwidth is not positive
    """
    sample = np.asarray(sample, dtype=float).reshape(-1)
    if sample.size < 2:
        raise InputError("kernel density estimation needs at least two observations", field="sample")
    if not np.all(np.isfinite(sample)):
        raise InputError("sample must be finite", field="sample")
    if bandwidth == "auto":
        h = silverman_bandwidth(sample)
    else:
        h = float(bandwidth)
        if not h > 0:
            raise DomainError(f"bandwidth must be positive, got {bandwidth}", field="bandwidth")
    return floor_densities(gaussian_kde(sample, np.asarray(quantile_points, dtype=float), h))


def kde_sparsity(samples: Sequence[np.ndarray], state: QuantileState) -> SparsityEstimate:
    """Per-series KDE sparsity evaluated at the averaged estimates of ``state``.

    Args:
        samples: One sample (full data or reservoir) per series
        state: Estimator whose averaged quantiles locate the evaluation points
    """
    if len(samples) != state.series_count:
        raise InputError(f"expected {state.series_count} samples, got {len(samples)}", field="samples")
    rows, bandwidths = [], []
    for sample, points in zip(samples, state.averaged):
        sample = np.asarray(sample, dtype=float).reshape(-1)
        if sample.size < 2:
            raise InputError("kernel density estimation needs at least two observations", field="sample")
        h = silverman_bandwidth(sample)
        rows.append(estimate_sparsity_kde(sample, points, h))
        bandwidths.append(h)
    return SparsityEstimate(values=np.vstack(rows), mode=SparsityMode.KDE, bandwidth=bandwidths)


def known_sparsity(distribution: stats.rv_continuous, grid: QuantileGrid,
                   series_count: int = 1) -> SparsityEstimate:
    """Exact sparsity ``f(F^-1(tau))`` of a known (scipy frozen) distribution."""
    row = distribution.pdf(distribution.ppf(grid.array))
    return SparsityEstimate(values=np.tile(row, (series_count, 1)), mode=SparsityMode.KNOWN)


def uniform_bands(state: QuantileState, sparsity: SparsityEstimate | np.ndarray,
                  critical_value: float) -> list[Band]:
    """Simultaneous bands ``Ybar +- c / (sqrt(n) f)`` for every (series, level).

    Raises:
        DomainError: If the critical value is negative
        NumericError: If a sparsity value is not strictly positive
        InputError: If no observation has been consumed yet or the sparsity shape does not
            match the estimator
    """
    if critical_value < 0 or not np.isfinite(critical_value):
        raise DomainError(f"critical value must be non-negative, got {critical_value}",
                          field="critical_value")
    if state.step < 1:
        raise InputError("bands need at least one observation", field="state")
    values = _sparsity_values(sparsity)
    try:
        values = np.broadcast_to(values, state.averaged.shape)
    except ValueError as e:
        raise InputError(f"sparsity must have shape {state.averaged.shape}, got {values.shape}",
                         field="sparsity") from e
    halfwidth = critical_value / (math.sqrt(state.step) * values)
    bands = []
    for i, row in enumerate(state.averaged):
        for j, tau in enumerate(state.grid.levels):
            estimate = float(row[j])
            bands.append(Band(series=i, tau=tau, lo=estimate - float(halfwidth[i, j]),
                              estimate=estimate, hi=estimate + float(halfwidth[i, j])))
    return bands


def run_test(state: QuantileState, null_quantiles: np.ndarray, sparsity: SparsityEstimate | np.ndarray,
             spec: BridgeSpec, alpha: float) -> InferenceReport:
    """Tests the null quantiles and reports the statistic, critical value, decision and bands.

    Raises:
        InputError: If ``spec`` does not describe the state's series and grid
    """
    if spec.series_count != state.series_count or spec.grid != state.grid:
        raise InputError("bridge process does not match the estimator", field="spec")
    statistic = test_statistic(state, null_quantiles, sparsity)
    critical = simulate_critical_value(spec, alpha)
    bands = uniform_bands(state, sparsity, critical)
    report = InferenceReport(statistic=statistic, critical_value=critical, alpha=alpha,
                             reject=statistic > critical, bands=bands)
    logger.info("Simultaneous test: %s", report)
    return report
