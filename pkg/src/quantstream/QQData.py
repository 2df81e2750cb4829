from typing import Any

from pydantic import ConfigDict, model_validator

from .JSONBaseModel import JSONBaseModel


class QQData(JSONBaseModel):
    """Equal-rank quantiles of the replication statistics and of the reference maxima.

    Attributes:
        empirical: Quantiles of the observed test statistics, non-decreasing
        reference: Quantiles of the simulated limiting maximum at the same ranks
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    empirical: list[float]
    reference: list[float]

    @model_validator(mode='after')
    def validate_lengths(self) -> 'QQData':
        if len(self.empirical) != len(self.reference):
            raise ValueError("empirical and reference must have the same length")
        return self

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.empirical, self.reference))

    def max_deviation(self) -> float:
        """Largest distance of a point from the identity line."""
        return max((abs(e - r) for e, r in self.points), default=0.0)

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [{"empirical": e, "reference": r} for e, r in self.points]
