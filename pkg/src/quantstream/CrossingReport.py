from typing import Any

from pydantic import ConfigDict, Field

from .Dgp import Dgp
from .JSONBaseModel import JSONBaseModel


class CrossingReport(JSONBaseModel):
    """How often plain and smoothed SGD produce crossed quantile curves.

    Rates are fractions of (replication, step) pairs at which some pair of
    adjacent levels is out of order.

    Attributes:
        dgp: Data-generating process
        n: Steps per replication
        levels: Quantile levels tracked together
        replications: Number of replications
        smoothed_rate: Crossing rate of the smoothed recursion (always zero)
        plain_rate: Crossing rate of plain SGD iterates
        plain_averaged_rate: Crossing rate of the averaged plain SGD iterates
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    dgp: Dgp
    n: int = Field(..., gt=0)
    levels: list[float]
    replications: int = Field(..., ge=1)
    smoothed_rate: float = Field(..., ge=0, le=1)
    plain_rate: float = Field(..., ge=0, le=1)
    plain_averaged_rate: float = Field(..., ge=0, le=1)

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [
            {"dgp": self.dgp.value, "n": self.n, "recursion": "smoothed", "rate": self.smoothed_rate},
            {"dgp": self.dgp.value, "n": self.n, "recursion": "plain", "rate": self.plain_rate},
            {"dgp": self.dgp.value, "n": self.n, "recursion": "plain averaged",
             "rate": self.plain_averaged_rate},
        ]
