import math
from typing import Optional

from pydantic import ConfigDict, Field, model_validator

from .Dgp import Dgp
from .JSONBaseModel import JSONBaseModel
from .SparsityMode import SparsityMode


class CoverageCell(JSONBaseModel):
    """Empirical rejection rate of one (process, n, beta, alpha) combination.

    Attributes:
        dgp: Data-generating process
        sparsity_mode: How the sparsity was obtained
        n: Observations per replication
        beta: Learning-rate decay exponent
        alpha: Nominal level
        replications: Number of replications
        rejections: Number of replications rejecting the true null
        rate: ``rejections / replications``
        standard_error: Monte Carlo standard error ``sqrt(rate (1 - rate) / replications)``
        reference: Published rate for this cell, when one exists
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    dgp: Dgp
    sparsity_mode: SparsityMode
    n: int = Field(..., gt=0)
    beta: float
    alpha: float = Field(..., gt=0, lt=1)
    replications: int = Field(..., ge=1)
    rejections: int = Field(..., ge=0)
    rate: float = Field(..., ge=0, le=1)
    standard_error: float = Field(..., ge=0)
    reference: Optional[float] = None

    @model_validator(mode='after')
    def validate_rate(self) -> 'CoverageCell':
        """Checks the rate and its standard error against the rejection count.

        Raises:
            ValueError: If the counts and the derived quantities disagree
        """
        if self.rejections > self.replications:
            raise ValueError("rejections cannot exceed replications")
        if not math.isclose(self.rate, self.rejections / self.replications, abs_tol=1e-12):
            raise ValueError("rate must equal rejections / replications")
        expected = math.sqrt(self.rate * (1 - self.rate) / self.replications)
        if not math.isclose(self.standard_error, expected, rel_tol=1e-9, abs_tol=1e-15):
            raise ValueError("standard_error must equal sqrt(rate (1 - rate) / replications)")
        return self

    @classmethod
    def from_rejections(cls, rejections: int, replications: int, **fields) -> 'CoverageCell':
        """Builds a cell, deriving the rate and its standard error from the counts."""
        rate = rejections / replications
        return cls(rejections=rejections, replications=replications, rate=rate,
                   standard_error=math.sqrt(rate * (1 - rate) / replications), **fields)

    def with_reference(self, reference: Optional[float]) -> 'CoverageCell':
        return self.model_copy(update={"reference": reference})
