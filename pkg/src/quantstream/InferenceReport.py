from typing import Any

from pydantic import ConfigDict, Field, model_validator
from typing_extensions import Annotated

from .Band import Band
from .JSONBaseModel import JSONBaseModel


class InferenceReport(JSONBaseModel):
    """Outcome of a simultaneous test over series and quantile levels.

    Attributes:
        statistic: Observed sup-statistic
        critical_value: Simulated (1 - alpha)-quantile of the limiting maximum
        alpha: Nominal level of the test
        reject: True iff the statistic exceeds the critical value
        bands: Uniform confidence band for every (series, level) pair
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    statistic: Annotated[float, Field(ge=0)]
    critical_value: Annotated[float, Field(ge=0)]
    alpha: Annotated[float, Field(gt=0, lt=1)]
    reject: bool
    bands: list[Band] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_decision(self) -> 'InferenceReport':
        """Checks that the decision matches the statistic and the critical value.

        Raises:
            ValueError: If ``reject`` disagrees with ``statistic > critical_value``
        """
        if self.reject != (self.statistic > self.critical_value):
            raise ValueError("reject must equal statistic > critical_value")
        return self

    def band(self, series: int, tau: float) -> Band:
        """Looks up the band of one (series, level) pair.

        Raises:
            KeyError: If no band matches
        """
        for band in self.bands:
            if band.series == series and band.tau == tau:
                return band
        raise KeyError(f"no band for series {series} at tau={tau}")

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "series": band.series,
                "tau": band.tau,
                "lo": band.lo,
                "estimate": band.estimate,
                "hi": band.hi,
                "statistic": self.statistic,
                "critical_value": self.critical_value,
                "alpha": self.alpha,
                "reject": self.reject,
            }
            for band in self.bands
        ]

    def __str__(self) -> str:
        decision = "reject" if self.reject else "do not reject"
        return (f"statistic={self.statistic:.6g}, critical value={self.critical_value:.6g} "
                f"at alpha={self.alpha:g}: {decision}")
