from enum import StrEnum

import numpy as np
from scipy import stats

from .QuantileGrid import QuantileGrid
from .errors import ConfigError

DEFAULT_DF = 10.0


class Dgp(StrEnum):
    """Data-generating processes of the Monte Carlo studies.

    Attributes:
        STANDARD_NORMAL: i.i.d. N(0, 1) draws
        STUDENT_T: i.i.d. Student t draws (10 degrees of freedom unless configured)
        COND_NORMAL_VARIANCE_X: Pairs with X ~ U[0, 1] and Y | X = x ~ N(0, x)
    """

    STANDARD_NORMAL = "standard_normal"
    STUDENT_T = "student_t"
    COND_NORMAL_VARIANCE_X = "cond_normal_variance_x"

    @property
    def description(self) -> str:
        """Human-readable description of the process."""
        return {
            Dgp.STANDARD_NORMAL: "Standard normal",
            Dgp.STUDENT_T: "Student t",
            Dgp.COND_NORMAL_VARIANCE_X: "Y | X = x ~ N(0, x) with X uniform on [0, 1]",
        }[self]

    @property
    def conditional(self) -> bool:
        return self == Dgp.COND_NORMAL_VARIANCE_X

    def distribution(self, df: float = DEFAULT_DF):
        """Frozen scipy distribution of a single observation.

        Raises:
            ConfigError: For the conditional process, which has no univariate law
        """
        if self == Dgp.STANDARD_NORMAL:
            return stats.norm()
        if self == Dgp.STUDENT_T:
            return stats.t(df)
        raise ConfigError(f"{self.value} has no univariate distribution", field="dgp")

    def sample(self, rng: np.random.Generator, size: int, df: float = DEFAULT_DF) -> np.ndarray:
        """Draws ``size`` observations; the conditional process returns a size x 2 array of (x, y)."""
        if self == Dgp.STANDARD_NORMAL:
            return rng.standard_normal(size)
        if self == Dgp.STUDENT_T:
            return rng.standard_t(df, size)
        x = rng.uniform(0.0, 1.0, size)
        return np.column_stack([x, np.sqrt(x) * rng.standard_normal(size)])

    def quantiles(self, grid: QuantileGrid, df: float = DEFAULT_DF) -> np.ndarray:
        """True quantiles Q(tau) on the grid."""
        return self.distribution(df).ppf(grid.array)

    def sparsity(self, grid: QuantileGrid, df: float = DEFAULT_DF) -> np.ndarray:
        """True densities f(Q(tau)) on the grid."""
        distribution = self.distribution(df)
        return distribution.pdf(distribution.ppf(grid.array))

    def conditional_quantiles(self, eval_points, grid: QuantileGrid) -> np.ndarray:
        """True conditional quantiles ``m(x, tau) = sqrt(x) * Phi^-1(tau)``, points x levels."""
        self._require_conditional()
        scale = np.sqrt(np.asarray(eval_points, dtype=float))
        return scale[:, None] * stats.norm.ppf(grid.array)

    def conditional_sparsity(self, eval_points, grid: QuantileGrid) -> np.ndarray:
        """True conditional densities ``f(m(x, tau) | x)`` of N(0, x), points x levels."""
        self._require_conditional()
        scale = np.sqrt(np.asarray(eval_points, dtype=float))[:, None]
        return stats.norm.pdf(self.conditional_quantiles(eval_points, grid), scale=scale)

    def design_density(self, eval_points) -> np.ndarray:
        """Density of the uniform regressor at the evaluation points."""
        self._require_conditional()
        return stats.uniform.pdf(np.asarray(eval_points, dtype=float))

    def _require_conditional(self) -> None:
        if not self.conditional:
            raise ConfigError(f"{self.value} is not a conditional process", field="dgp")
