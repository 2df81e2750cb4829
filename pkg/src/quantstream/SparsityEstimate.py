from typing import Optional

import numpy as np
from pydantic import ConfigDict, Field, field_serializer, field_validator, model_validator

from .JSONBaseModel import JSONBaseModel
from .SparsityMode import SparsityMode


class SparsityEstimate(JSONBaseModel):
    """Density of each series at each of its quantiles, f_i(Q_i(tau)).

    Attributes:
        values: p x |grid| matrix of strictly positive densities
        mode: Whether the values are known or kernel estimates
        bandwidth: Kernel bandwidth per series (KDE mode only)
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        frozen=True,
        extra='forbid'
    )

    values: np.ndarray
    mode: SparsityMode = SparsityMode.KNOWN
    bandwidth: Optional[list[float]] = Field(default=None, description="KDE bandwidth per series")

    @field_validator('values', mode='before')
    def coerce_values(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float)
        return array[None, :] if array.ndim == 1 else array

    @field_serializer('values')
    def serialize_values(self, value: np.ndarray) -> list:
        return value.tolist()

    @model_validator(mode='after')
    def validate_values(self) -> 'SparsityEstimate':
        """Checks that every density is finite and strictly positive.

        Raises:
            ValueError: If a density is zero, negative or not finite
        """
        if self.values.ndim != 2:
            raise ValueError("values must be a p x |grid| matrix")
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValueError("sparsity values must be finite and strictly positive")
        if self.mode == SparsityMode.KDE and self.bandwidth is not None:
            if any(h <= 0 for h in self.bandwidth):
                raise ValueError("bandwidths must be positive")
        return self

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def scaled(self, factor: float) -> 'SparsityEstimate':
        """Returns a copy with every density multiplied by ``factor``."""
        return SparsityEstimate(values=self.values * factor, mode=self.mode, bandwidth=self.bandwidth)
