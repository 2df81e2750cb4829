"""Named study configurations and their published empirical sizes."""
from enum import StrEnum
from typing import Optional, Sequence

from .Dgp import Dgp
from .ExperimentPlan import ExperimentPlan
from .SparsityMode import SparsityMode

ALPHA_LEVELS = (0.15, 0.10, 0.05, 0.01)

BETAS = (0.6, 0.7, 0.8)

SIZES_KNOWN = (100, 250, 500, 1000, 2000, 4000)

SIZES_KDE = (1000, 2000, 4000, 8000)

PRESET_REPLICATIONS = 1000


class Preset(StrEnum):
    """Studies that ``reproduce`` can run by name.

    Attributes:
        TABLE1: Gaussian data, known sparsity, n x beta grid
        TABLE2: Gaussian and t10 data, kernel-estimated sparsity, beta = 0.7
        TABLE3: t10 data, known sparsity, n x beta grid
        CONDITIONAL: Conditional quantiles of N(0, x) at four regressor values
        QQ: Quantile-quantile data of the statistic against the limiting maximum
        CROSSING: Crossing frequency of plain against smoothed SGD
    """

    TABLE1 = "table1"
    TABLE2 = "table2"
    TABLE3 = "table3"
    CONDITIONAL = "conditional"
    QQ = "qq"
    CROSSING = "crossing"

    @property
    def description(self) -> str:
        return {
            Preset.TABLE1: "Empirical size for Gaussian data, known sparsity",
            Preset.TABLE2: "Empirical size with kernel-estimated sparsity, beta = 0.7",
            Preset.TABLE3: "Empirical size for t10 data, known sparsity",
            Preset.CONDITIONAL: "Conditional quantile study, Y | X = x ~ N(0, x)",
            Preset.QQ: "QQ data of the test statistic, Gaussian data, n = 4000",
            Preset.CROSSING: "Quantile crossing of plain and smoothed SGD",
        }[self]

    @property
    def is_table(self) -> bool:
        return self in (Preset.TABLE1, Preset.TABLE2, Preset.TABLE3)


def _rows(values: dict[int, tuple[float, ...]], betas: Sequence[float]) -> dict[tuple[int, float, float], float]:
    table = {}
    for n, row in values.items():
        for b, beta in enumerate(betas):
            for a, alpha in enumerate(ALPHA_LEVELS):
                table[(n, beta, alpha)] = row[4 * b + a]
    return table


GAUSSIAN_KNOWN = _rows({
    100: (0.127, 0.098, 0.055, 0.017, 0.193, 0.131, 0.069, 0.017, 0.333, 0.246, 0.156, 0.056),
    250: (0.104, 0.068, 0.037, 0.007, 0.190, 0.139, 0.080, 0.023, 0.438, 0.318, 0.187, 0.056),
    500: (0.118, 0.081, 0.054, 0.012, 0.198, 0.138, 0.078, 0.013, 0.451, 0.347, 0.225, 0.073),
    1000: (0.093, 0.068, 0.038, 0.006, 0.179, 0.120, 0.066, 0.016, 0.441, 0.339, 0.233, 0.087),
    2000: (0.121, 0.084, 0.038, 0.006, 0.160, 0.096, 0.048, 0.016, 0.456, 0.343, 0.211, 0.074),
    4000: (0.112, 0.073, 0.044, 0.007, 0.158, 0.108, 0.055, 0.016, 0.395, 0.292, 0.183, 0.050),
}, BETAS)

STUDENT_T_KNOWN = _rows({
    100: (0.131, 0.092, 0.047, 0.009, 0.186, 0.130, 0.080, 0.032, 0.312, 0.235, 0.141, 0.046),
    250: (0.142, 0.091, 0.047, 0.011, 0.191, 0.135, 0.071, 0.024, 0.436, 0.326, 0.207, 0.071),
    500: (0.123, 0.082, 0.046, 0.011, 0.210, 0.157, 0.077, 0.019, 0.482, 0.386, 0.253, 0.102),
    1000: (0.135, 0.094, 0.044, 0.008, 0.206, 0.149, 0.078, 0.026, 0.539, 0.442, 0.294, 0.109),
    2000: (0.124, 0.083, 0.048, 0.017, 0.186, 0.122, 0.065, 0.015, 0.524, 0.414, 0.266, 0.093),
    4000: (0.120, 0.075, 0.036, 0.009, 0.179, 0.124, 0.054, 0.008, 0.479, 0.373, 0.237, 0.081),
}, BETAS)

GAUSSIAN_KDE = _rows({
    1000: (0.216, 0.165, 0.083, 0.023),
    2000: (0.181, 0.121, 0.064, 0.020),
    4000: (0.166, 0.107, 0.058, 0.010),
    8000: (0.162, 0.117, 0.067, 0.009),
}, (0.7,))

STUDENT_T_KDE = _rows({
    1000: (0.262, 0.198, 0.110, 0.031),
    2000: (0.220, 0.141, 0.070, 0.020),
    4000: (0.166, 0.116, 0.062, 0.014),
    8000: (0.155, 0.106, 0.060, 0.014),
}, (0.7,))

REFERENCE_SIZES: dict[tuple[Dgp, SparsityMode], dict[tuple[int, float, float], float]] = {
    (Dgp.STANDARD_NORMAL, SparsityMode.KNOWN): GAUSSIAN_KNOWN,
    (Dgp.STUDENT_T, SparsityMode.KNOWN): STUDENT_T_KNOWN,
    (Dgp.STANDARD_NORMAL, SparsityMode.KDE): GAUSSIAN_KDE,
    (Dgp.STUDENT_T, SparsityMode.KDE): STUDENT_T_KDE,
}


def reference_size(dgp: Dgp, sparsity_mode: SparsityMode, n: int, beta: float,
                   alpha: float) -> Optional[float]:
    """Published empirical size of a cell, or None when the cell was not reported."""
    return REFERENCE_SIZES.get((dgp, sparsity_mode), {}).get((n, beta, alpha))


def table_plans(preset: Preset, replications: Optional[int] = None,
                sizes: Optional[Sequence[int]] = None, seed: int = 0) -> list[ExperimentPlan]:
    """Expands a table preset into one plan per (process, n, beta).

    Args:
        preset: One of the table presets
        replications: Overrides the 1000 replications of the published study
        sizes: Restricts the rows to these sample sizes
        seed: Root seed; every plan derives its own seed from it

    Raises:
        ValueError: If ``preset`` is not a table preset
    """
    if not preset.is_table:
        raise ValueError(f"{preset.value} is not a table preset")
    if preset == Preset.TABLE2:
        layout = [(dgp, SparsityMode.KDE, SIZES_KDE, (0.7,)) for dgp in (Dgp.STANDARD_NORMAL, Dgp.STUDENT_T)]
    else:
        dgp = Dgp.STANDARD_NORMAL if preset == Preset.TABLE1 else Dgp.STUDENT_T
        layout = [(dgp, SparsityMode.KNOWN, SIZES_KNOWN, BETAS)]
    plans = []
    for dgp, mode, default_sizes, betas in layout:
        for n in (sizes if sizes else default_sizes):
            for beta in betas:
                plans.append(ExperimentPlan(
                    dgp=dgp, n=n, beta=beta, sparsity_mode=mode, alpha_levels=list(ALPHA_LEVELS),
                    replications=replications or PRESET_REPLICATIONS, seed=seed + len(plans)
                ))
    return plans


def conditional_plan(replications: Optional[int] = None, n: int = 4000, seed: int = 0) -> ExperimentPlan:
    """Plan of the conditional study: x in {0.2, 0.4, 0.6, 0.8}, h = 0.2, beta = 0.7."""
    return ExperimentPlan(dgp=Dgp.COND_NORMAL_VARIANCE_X, n=n, beta=0.7,
                          replications=replications or PRESET_REPLICATIONS, seed=seed,
                          eval_points=[0.2, 0.4, 0.6, 0.8], bandwidth=0.2,
                          alpha_levels=list(ALPHA_LEVELS))


def qq_plan(replications: Optional[int] = None, n: int = 4000, seed: int = 0,
            dgp: Dgp = Dgp.STANDARD_NORMAL) -> ExperimentPlan:
    """Plan of the QQ study under known sparsity."""
    return ExperimentPlan(dgp=dgp, n=n, beta=0.7, replications=replications or PRESET_REPLICATIONS,
                          seed=seed)
