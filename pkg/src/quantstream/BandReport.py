from typing import Any

from pydantic import ConfigDict, Field
from typing_extensions import Annotated

from .Band import Band
from .JSONBaseModel import JSONBaseModel


class BandReport(JSONBaseModel):
    """Uniform confidence bands over all (series, level) pairs, without a tested null.

    Attributes:
        alpha: One minus the simultaneous coverage
        critical_value: Simulated (1 - alpha)-quantile of the limiting maximum
        step: Number of observations behind the estimates
        bands: One band per (series, level) pair
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    alpha: Annotated[float, Field(gt=0, lt=1)]
    critical_value: Annotated[float, Field(ge=0)]
    step: Annotated[int, Field(ge=1)]
    bands: list[Band]

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [
            {"series": band.series, "tau": band.tau, "lo": band.lo, "estimate": band.estimate,
             "hi": band.hi, "alpha": self.alpha, "critical_value": self.critical_value}
            for band in self.bands
        ]
