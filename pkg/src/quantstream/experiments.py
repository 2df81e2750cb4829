"""Monte Carlo harness for the size, QQ, tail, crossing and residual studies.

Replication ``r`` of a plan draws its data from its own generator, seeded by
``SeedSequence([seed, DATA_STREAM], spawn_key=(r,))``, so any replication can be
rerun in isolation and results do not depend on how replications are grouped.
Replications are processed in blocks, each replication being one series of a
vectorized estimator.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from .ConditionalState import conditional_step
from .CoverageCell import CoverageCell
from .CoverageTable import CoverageTable
from .CrossingReport import CrossingReport
from .Dgp import DEFAULT_DF, Dgp
from .EstimateMode import EstimateMode
from .ExperimentPlan import ExperimentPlan
from .QQData import QQData
from .QuantileGrid import QuantileGrid
from .QuantileState import QuantileState
from .ScheduleConfig import ScheduleConfig
from .SparsityMode import SparsityMode
from .TailCurve import TailCurve
from .conditional import conditional_statistics, estimate_cond_densities
from .errors import ConfigError, DomainError, QuantStreamError
from .inference import (critical_value_from_sample, estimate_sparsity_kde, independent_bridges_spec,
                        series_statistics, simulate_bridge_maxima)
from .oracle import bahadur_terms, sgd_trace
from .presets import Preset, reference_size, table_plans

logger = logging.getLogger(__name__)

DATA_STREAM = 1
CRITICAL_STREAM = 2

# Replications advanced together by one vectorized estimator
BLOCK_SIZE = 250


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Generator of the data of one replication."""
    return np.random.default_rng(np.random.SeedSequence([seed, DATA_STREAM], spawn_key=(replication,)))


def _blocks(replications: int) -> list[range]:
    return [range(start, min(start + BLOCK_SIZE, replications))
            for start in range(0, replications, BLOCK_SIZE)]


def _failed(error: QuantStreamError, replication: int) -> QuantStreamError:
    logger.error("Replication %d failed: %s", replication, error)
    return type(error)(f"replication {replication}: {error.reason}", field=error.field)


def _draw(dgp: Dgp, seed: int, replications: range, n: int, df: float) -> np.ndarray:
    return np.stack([dgp.sample(replication_rng(seed, r), n, df) for r in replications], axis=1)


def _marginal_statistics(plan: ExperimentPlan, replications: range) -> np.ndarray:
    data = _draw(plan.dgp, plan.seed, replications, plan.n, plan.df)
    state = QuantileState.init(len(replications), plan.grid, plan.schedule(),
                               initial_values=np.full(len(replications), plan.initial_value))
    state.merge_array(data)
    null = plan.dgp.quantiles(plan.grid, plan.df)[None, :]
    if plan.sparsity_mode == SparsityMode.KNOWN:
        sparsity = plan.dgp.sparsity(plan.grid, plan.df)
    else:
        rows = []
        for j, r in enumerate(replications):
            try:
                rows.append(estimate_sparsity_kde(data[:, j], state.averaged[j]))
            except QuantStreamError as e:
                raise _failed(e, r) from e
        sparsity = np.vstack(rows)
    return series_statistics(state.averaged, null, sparsity, plan.n)


def _conditional_statistics(plan: ExperimentPlan, replications: range) -> np.ndarray:
    config = plan.conditional_config()
    points, levels = config.points, config.grid.array
    pairs = _draw(plan.dgp, plan.seed, replications, plan.n, plan.df)
    shape = (len(replications), len(points), len(levels))
    iterates = np.full(shape, plan.initial_value)
    averaged = iterates.copy()
    for k in range(1, plan.n + 1):
        iterates, averaged = conditional_step(iterates, averaged, k, pairs[k - 1, :, 0], pairs[k - 1, :, 1],
                                              points, levels, config.schedule, config.bandwidth)
    null = plan.dgp.conditional_quantiles(points, config.grid)
    if plan.sparsity_mode == SparsityMode.KNOWN:
        design = plan.dgp.design_density(points)
        sparsity = plan.dgp.conditional_sparsity(points, config.grid)
    else:
        estimates = []
        for j, r in enumerate(replications):
            try:
                estimates.append(estimate_cond_densities(pairs[:, j, :], points, averaged[j]))
            except QuantStreamError as e:
                raise _failed(e, r) from e
        design = np.stack([g for g, _ in estimates])
        sparsity = np.stack([f for _, f in estimates])
    return conditional_statistics(averaged, null, sparsity, design, config.bandwidth, plan.n)


def replication_statistics(plan: ExperimentPlan) -> np.ndarray:
    """Test statistic of every replication of ``plan`` under the true null."""
    compute = _conditional_statistics if plan.conditional else _marginal_statistics
    statistics = np.concatenate([compute(plan, block) for block in _blocks(plan.replications)])
    logger.info("Simulated %d replications of %s with n=%d", plan.replications, plan.dgp.value, plan.n)
    return statistics


def _series_count(plan: ExperimentPlan) -> int:
    return len(plan.eval_points) if plan.conditional else 1


def reference_maxima(plan: ExperimentPlan, seed: Optional[int] = None) -> np.ndarray:
    """Sample of the limiting maximum matching the plan's grid and series."""
    spec = independent_bridges_spec(plan.grid, _series_count(plan), plan.bridge_replications,
                                    seed=plan.seed if seed is None else seed)
    return simulate_bridge_maxima(spec)


def _critical_seed(plan: ExperimentPlan, replication: int) -> int:
    sequence = np.random.SeedSequence([plan.seed, CRITICAL_STREAM], spawn_key=(replication,))
    return int(sequence.generate_state(1)[0])


def _rejections(plan: ExperimentPlan, statistics: np.ndarray) -> dict[float, int]:
    if not plan.resimulate_critical:
        maxima = reference_maxima(plan)
        return {alpha: int(np.count_nonzero(statistics > critical_value_from_sample(maxima, alpha)))
                for alpha in plan.alpha_levels}
    counts = dict.fromkeys(plan.alpha_levels, 0)
    for r, statistic in enumerate(statistics):
        maxima = reference_maxima(plan, seed=_critical_seed(plan, r))
        for alpha in plan.alpha_levels:
            counts[alpha] += int(statistic > critical_value_from_sample(maxima, alpha))
    return counts


def _coverage_table(plan: ExperimentPlan, statistics: np.ndarray, title: str) -> CoverageTable:
    cells = [
        CoverageCell.from_rejections(
            rejections, plan.replications, dgp=plan.dgp, sparsity_mode=plan.sparsity_mode, n=plan.n,
            beta=plan.beta, alpha=alpha,
            reference=reference_size(plan.dgp, plan.sparsity_mode, plan.n, plan.beta, alpha)
        )
        for alpha, rejections in _rejections(plan, statistics).items()
    ]
    return CoverageTable(title=title, cells=cells)


def run_coverage(plan: ExperimentPlan) -> CoverageTable:
    """Empirical size of the simultaneous test at every alpha level of ``plan``.

    Every replication streams ``plan.n`` draws through the estimator and tests the
    true quantiles; one simulated critical value per alpha is shared by all
    replications unless ``plan.resimulate_critical`` is set.
    """
    if plan.conditional:
        return run_conditional_coverage(plan)
    return _coverage_table(plan, replication_statistics(plan),
                           f"{plan.dgp.description}, {plan.sparsity_mode.value} sparsity")


def run_conditional_coverage(plan: ExperimentPlan) -> CoverageTable:
    """Empirical size of the conditional-quantile test over evaluation points x levels.

    Raises:
        ConfigError: If the plan does not use the conditional process
    """
    if not plan.conditional:
        raise ConfigError("plan does not describe a conditional study", field="dgp")
    return _coverage_table(plan, replication_statistics(plan), plan.dgp.description)


def qq_pairs(sample: np.ndarray, reference: np.ndarray) -> QQData:
    """Pairs equal-rank quantiles of two samples at probabilities (i + 1/2) / L.

    ``L`` is the size of the smaller sample.
    """
    size = min(len(sample), len(reference))
    probabilities = (np.arange(size) + 0.5) / size
    empirical = np.quantile(sample, probabilities, method="inverted_cdf")
    limit = np.quantile(reference, probabilities, method="inverted_cdf")
    return QQData(empirical=empirical.tolist(), reference=limit.tolist())


def run_qq(plan: ExperimentPlan) -> QQData:
    """QQ data of the replication statistics against the simulated limiting maximum."""
    return qq_pairs(replication_statistics(plan), reference_maxima(plan))


def run_tail_curve(dgp: Dgp, n: int, tau: float, x_values: Sequence[float], replications: int,
                   cfg: Optional[ScheduleConfig] = None, seed: int = 0, df: float = DEFAULT_DF,
                   initial_value: float = 0.0) -> TailCurve:
    """Monte Carlo frequencies of ``|estimate - Q(tau)| > x`` for the averaged and last iterate.

    Raises:
        DomainError: If the thresholds are negative or not strictly increasing
    """
    thresholds = np.asarray(x_values, dtype=float)
    if thresholds.size == 0 or np.any(thresholds < 0) or np.any(np.diff(thresholds) <= 0):
        raise DomainError("thresholds must be non-negative and strictly increasing", field="x_values")
    cfg = cfg if cfg is not None else ScheduleConfig()
    grid = QuantileGrid.of([tau])
    quantile = dgp.quantiles(grid, df)[0]
    deviations = {EstimateMode.AVERAGED: [], EstimateMode.RAW: []}
    for block in _blocks(replications):
        state = QuantileState.init(len(block), grid, cfg, initial_values=np.full(len(block), initial_value))
        state.merge_array(_draw(dgp, seed, block, n, df))
        for mode, collected in deviations.items():
            collected.append(np.abs(state.estimates(mode)[:, 0] - quantile))
    frequencies = {mode: (np.concatenate(values)[:, None] > thresholds).mean(axis=0).tolist()
                   for mode, values in deviations.items()}
    return TailCurve(n=n, tau=tau, replications=replications, x_values=thresholds.tolist(),
                     averaged=frequencies[EstimateMode.AVERAGED], raw=frequencies[EstimateMode.RAW])


def run_crossing(dgp: Dgp = Dgp.STANDARD_NORMAL, n: int = 1000, levels: Sequence[float] = (0.4, 0.5, 0.6),
                 replications: int = 100, schedule: Optional[ScheduleConfig] = None, seed: int = 0,
                 df: float = DEFAULT_DF) -> CrossingReport:
    """Runs plain and smoothed SGD on the same streams and counts crossed curves after each step."""
    schedule = schedule if schedule is not None else ScheduleConfig()
    smoothed = schedule.model_copy(update={"smoothed": True})
    plain = schedule.model_copy(update={"smoothed": False})
    grid = QuantileGrid.of(levels)
    counts = {"smoothed": 0, "plain": 0, "plain_averaged": 0}
    for block in _blocks(replications):
        data = _draw(dgp, seed, block, n, df)
        states = {name: QuantileState.init(len(block), grid, cfg)
                  for name, cfg in (("smoothed", smoothed), ("plain", plain))}
        for row in data:
            for state in states.values():
                state.update(row)
            counts["smoothed"] += int(np.count_nonzero(
                states["smoothed"].crossings(EstimateMode.RAW) + states["smoothed"].crossings(EstimateMode.AVERAGED)
            ))
            counts["plain"] += int(np.count_nonzero(states["plain"].crossings(EstimateMode.RAW)))
            counts["plain_averaged"] += int(np.count_nonzero(states["plain"].crossings(EstimateMode.AVERAGED)))
    total = replications * n
    report = CrossingReport(dgp=dgp, n=n, levels=list(grid.levels), replications=replications,
                            smoothed_rate=counts["smoothed"] / total, plain_rate=counts["plain"] / total,
                            plain_averaged_rate=counts["plain_averaged"] / total)
    logger.info("Crossing rates: smoothed %.4f, plain %.4f", report.smoothed_rate, report.plain_rate)
    return report


def run_table(preset: Preset | str, replications: Optional[int] = None,
              sizes: Optional[Sequence[int]] = None, seed: int = 0) -> CoverageTable:
    """Runs every plan of a table preset and collects the cells with their published sizes."""
    preset = Preset(preset)
    table = CoverageTable(title=preset.description)
    for plan in table_plans(preset, replications=replications, sizes=sizes, seed=seed):
        table.extend(run_coverage(plan))
    return table


def run_bahadur_decay(dgp: Dgp = Dgp.STANDARD_NORMAL, sizes: Sequence[int] = (1000, 10000), tau: float = 0.5,
                      replications: int = 200, schedule: Optional[ScheduleConfig] = None, seed: int = 0,
                      df: float = DEFAULT_DF) -> list[tuple[int, float]]:
    """Mean of ``sqrt(n) * |residual|`` of the linearized averaged estimate for each sample size."""
    schedule = schedule if schedule is not None else ScheduleConfig()
    distribution = dgp.distribution(df)
    quantile = float(distribution.ppf(tau))
    density = float(distribution.pdf(quantile))
    results = []
    for n in sizes:
        scaled = []
        for block in _blocks(replications):
            data = _draw(dgp, seed, block, n, df)
            trace = sgd_trace(data, schedule, tau)
            for j in range(len(block)):
                terms = bahadur_terms(data[:, j], trace[:, j], schedule, tau, quantile, density,
                                      distribution.cdf)
                scaled.append(terms.scaled_residual())
        results.append((n, float(np.mean(scaled))))
        logger.info("Mean scaled residual at n=%d: %.4g", n, results[-1][1])
    return results
