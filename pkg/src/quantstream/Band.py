from pydantic import ConfigDict, Field, model_validator

from .JSONBaseModel import JSONBaseModel


class Band(JSONBaseModel):
    """Simultaneous confidence interval for one (series, level) pair.

    Attributes:
        series: 0-based series index
        tau: Quantile level
        lo: Lower band endpoint
        estimate: Averaged SGD estimate at the centre of the band
        hi: Upper band endpoint
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    series: int = Field(..., ge=0)
    tau: float = Field(..., gt=0, lt=1)
    lo: float
    estimate: float
    hi: float

    @model_validator(mode='after')
    def validate_order(self) -> 'Band':
        if not self.lo <= self.estimate <= self.hi:
            raise ValueError("band must satisfy lo <= estimate <= hi")
        return self

    @property
    def halfwidth(self) -> float:
        return (self.hi - self.lo) / 2

    def contains(self, value: float) -> bool:
        """Checks whether ``value`` lies inside the closed band."""
        return self.lo <= value <= self.hi
