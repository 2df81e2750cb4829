from typing import Callable, ClassVar

import numpy as np
from pydantic import ConfigDict, Field
from typing_extensions import Annotated

from .JSONBaseModel import JSONBaseModel
from .QuantileGrid import QuantileGrid
from .errors import NumericError

CovarianceFunction = Callable[[int, float, int, float], float]


class BridgeSpec(JSONBaseModel):
    """Centered Gaussian process over (series x quantile grid) used for critical values.

    The process is described by its covariance function ``cov(i, t, j, s)``;
    for independent Brownian bridges it is ``min(s, t) * (1 - max(s, t))`` on
    the diagonal blocks and zero elsewhere.

    Attributes:
        grid: Quantile levels at which the process is observed
        series_count: Number of component processes
        covariance: Symmetric covariance function (i, t, j, s) -> real
        replications: Number of Monte Carlo draws (at least 1000)
        seed: Seed of the draws
        independent_bridges: True when the covariance is the independent-bridge one,
            enabling a block-diagonal construction of the covariance matrix
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        frozen=True,
        extra='forbid'
    )

    # Tolerance on covariance-matrix asymmetry
    SYMMETRY_TOLERANCE: ClassVar[float] = 1e-12

    grid: QuantileGrid
    series_count: Annotated[int, Field(gt=0)] = 1
    covariance: CovarianceFunction = Field(..., exclude=True)
    replications: Annotated[
        int,
        Field(
            description="Monte Carlo draws of the Gaussian vector",
            ge=1000
        )
    ] = 100_000
    seed: int = Field(default=0, ge=0)
    independent_bridges: bool = False

    @property
    def dimension(self) -> int:
        """Length of the Gaussian vector, series_count * |grid|."""
        return self.series_count * len(self.grid)

    def covariance_matrix(self) -> np.ndarray:
        """Builds the covariance matrix with series-major ordering.

        Raises:
            NumericError: If the covariance function is not symmetric
        """
        levels = self.grid.levels
        if self.independent_bridges:
            t = np.asarray(levels)
            block = np.minimum.outer(t, t) * (1.0 - np.maximum.outer(t, t))
            return np.kron(np.eye(self.series_count), block)
        m = len(levels)
        matrix = np.empty((self.dimension, self.dimension))
        for i in range(self.series_count):
            for a, t in enumerate(levels):
                for j in range(self.series_count):
                    for b, s in enumerate(levels):
                        matrix[i * m + a, j * m + b] = self.covariance(i, t, j, s)
        if not np.allclose(matrix, matrix.T, rtol=0.0, atol=self.SYMMETRY_TOLERANCE):
            raise NumericError("covariance function is not symmetric", field="covariance")
        return matrix
