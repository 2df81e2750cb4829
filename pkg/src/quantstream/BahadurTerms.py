from typing import ClassVar

import numpy as np
from pydantic import ConfigDict, Field, model_validator

from .JSONBaseModel import JSONBaseModel


class BahadurTerms(JSONBaseModel):
    """Linearization of one averaged quantile estimate around the true quantile.

    ``xi[k]`` is the martingale difference of update ``k + 1``: the smoothed score
    of that update minus its conditional mean given the previous iterate. The
    estimate decomposes as ``averaged - Q = xi_bar / f(Q) + residual``.

    Attributes:
        xi: Per-step martingale differences, each in [-1, 1]
        xi_bar: Mean of ``xi``
        averaged: Averaged estimate Ybar_n
        residual: ``Ybar_n - Q - xi_bar / f(Q)``
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    # Quadrature error allowed on top of the |xi| <= 1 bound
    XI_TOLERANCE: ClassVar[float] = 1e-9

    xi: list[float] = Field(..., min_length=1)
    xi_bar: float
    averaged: float
    residual: float

    @model_validator(mode='after')
    def validate_terms(self) -> 'BahadurTerms':
        values = np.asarray(self.xi)
        if np.any(np.abs(values) > 1.0 + self.XI_TOLERANCE):
            raise ValueError("martingale differences must lie in [-1, 1]")
        if not np.isclose(values.mean(), self.xi_bar, rtol=1e-12, atol=1e-15):
            raise ValueError("xi_bar must equal the mean of xi")
        return self

    @property
    def n(self) -> int:
        return len(self.xi)

    def scaled_residual(self) -> float:
        """Returns ``sqrt(n) * |residual|``, which vanishes as n grows."""
        return float(np.sqrt(self.n) * abs(self.residual))
