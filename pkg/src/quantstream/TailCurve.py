from typing import Any

from pydantic import ConfigDict, Field, model_validator

from .JSONBaseModel import JSONBaseModel


class TailCurve(JSONBaseModel):
    """Monte Carlo tail frequencies ``P(|estimate - Q(tau)| > x)`` on a grid of x.

    Attributes:
        n: Observations per replication
        tau: Quantile level
        replications: Number of replications
        x_values: Thresholds, strictly increasing
        averaged: Tail frequency of the averaged estimate at each threshold
        raw: Tail frequency of the last SGD iterate at each threshold
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    n: int = Field(..., gt=0)
    tau: float = Field(..., gt=0, lt=1)
    replications: int = Field(..., ge=1)
    x_values: list[float]
    averaged: list[float]
    raw: list[float]

    @model_validator(mode='after')
    def validate_lengths(self) -> 'TailCurve':
        if not len(self.x_values) == len(self.averaged) == len(self.raw):
            raise ValueError("x_values, averaged and raw must have the same length")
        return self

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [
            {"n": self.n, "tau": self.tau, "x": x, "averaged": averaged, "raw": raw}
            for x, averaged, raw in zip(self.x_values, self.averaged, self.raw)
        ]
