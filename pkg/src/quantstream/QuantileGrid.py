from typing import Sequence

import numpy as np
from pydantic import Field, ConfigDict, field_validator
from typing_extensions import Annotated

from .JSONBaseModel import JSONBaseModel


class QuantileGrid(JSONBaseModel):
    """Ordered set of quantile levels estimated side by side.

    Attributes:
        levels: Strictly increasing levels, each in the open interval (0, 1)

    Examples:
        >>> QuantileGrid.deciles().levels[:3]
        [0.1, 0.2, 0.3]
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    levels: Annotated[
        list[float],
        Field(
            description="Quantile levels, strictly increasing in (0, 1)",
            min_length=1
        )
    ]

    @field_validator('levels')
    def validate_levels(cls, value: list[float]) -> list[float]:
        """Checks range and strict ordering of the levels.

        Raises:
            ValueError: If a level is outside (0, 1) or the levels are not strictly increasing
        """
        for tau in value:
            if not 0.0 < tau < 1.0:
                raise ValueError(f"quantile level {tau} is outside (0, 1)")
        if any(lo >= hi for lo, hi in zip(value, value[1:])):
            raise ValueError("quantile levels must be strictly increasing")
        return value

    @classmethod
    def deciles(cls) -> 'QuantileGrid':
        """Returns the grid {0.1, 0.2, ..., 0.9}."""
        return cls(levels=[round(0.1 * i, 10) for i in range(1, 10)])

    @classmethod
    def parse(cls, text: str) -> 'QuantileGrid':
        """Builds a grid from a comma-separated list such as ``"0.1,0.5,0.9"``."""
        return cls(levels=[float(part) for part in text.split(",") if part.strip()])

    @classmethod
    def of(cls, levels: Sequence[float]) -> 'QuantileGrid':
        return cls(levels=[float(tau) for tau in levels])

    @property
    def tau0(self) -> float:
        """Lowest level of the grid."""
        return self.levels[0]

    @property
    def tau1(self) -> float:
        """Highest level of the grid."""
        return self.levels[-1]

    @property
    def array(self) -> np.ndarray:
        """Levels as a float array, ready to broadcast against iterate rows."""
        return np.asarray(self.levels, dtype=float)

    def __len__(self) -> int:
        return len(self.levels)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{tau:g}" for tau in self.levels) + "}"
