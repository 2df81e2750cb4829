import math
from typing import Any, Literal

import numpy as np
from pydantic import ConfigDict, Field, field_validator, model_validator
from typing_extensions import Annotated

from .JSONBaseModel import JSONBaseModel
from .QuantileGrid import QuantileGrid
from .ScheduleConfig import ScheduleConfig


class ConditionalConfig(JSONBaseModel):
    """Setup of the local-constant streaming conditional quantile estimator.

    Each update is weighted by ``h^-1 K((x_i - X) / h)`` with the uniform kernel
    ``K(u) = 1/2 * 1{|u| <= 1}``. The weighted recursion keeps the estimates
    ordered in tau only while the peak weight ``1 / (2h)`` does not exceed
    ``2a``; configurations breaking that bound are rejected. When no schedule
    is given, ``a`` defaults to ``max(1, 1 / (4h))``.

    Attributes:
        eval_points: Distinct regressor values x_i at which m(x_i, tau) is tracked
        bandwidth: Kernel bandwidth h
        kernel: Kernel name; only the uniform kernel is supported
        grid: Quantile levels
        schedule: Learning-rate schedule shared by all evaluation points
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    eval_points: Annotated[
        list[float],
        Field(
            description="Evaluation points x_i",
            min_length=1
        )
    ] = [0.2, 0.4, 0.6, 0.8]

    bandwidth: Annotated[
        float,
        Field(
            description="Kernel bandwidth h",
            gt=0,
            allow_inf_nan=False
        )
    ] = 0.2

    kernel: Literal["uniform"] = "uniform"

    grid: QuantileGrid = Field(default_factory=QuantileGrid.deciles)

    schedule: ScheduleConfig

    @model_validator(mode='before')
    @classmethod
    def default_schedule(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get('schedule') is None:
            bandwidth = data.get('bandwidth', 0.2)
            if isinstance(bandwidth, (int, float)) and bandwidth > 0:
                data = {**data, 'schedule': ScheduleConfig(a=max(1.0, cls.minimum_a(bandwidth)))}
        return data

    @field_validator('eval_points')
    def validate_eval_points(cls, value: list[float]) -> list[float]:
        if not all(math.isfinite(x) for x in value):
            raise ValueError("evaluation points must be finite")
        if len(set(value)) != len(value):
            raise ValueError("evaluation points must be distinct")
        return value

    @model_validator(mode='after')
    def validate_order_preservation(self) -> 'ConditionalConfig':
        """Rejects schedules whose smoothing is too narrow for the kernel weight.

        Raises:
            ValueError: If ``1 / (2h) > 2a``
        """
        if self.peak_weight > 2 * self.schedule.a:
            raise ValueError(
                f"smoothing multiple a={self.schedule.a:g} is below 1/(4h)={self.minimum_a(self.bandwidth):g}; "
                "conditional quantile curves could cross"
            )
        return self

    @staticmethod
    def minimum_a(bandwidth: float) -> float:
        """Smallest smoothing multiple that keeps weighted updates order-preserving."""
        return 1.0 / (4.0 * bandwidth)

    @property
    def peak_weight(self) -> float:
        """Kernel weight ``1 / (2h)`` of an observation inside the window."""
        return 0.5 / self.bandwidth

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.eval_points, dtype=float)
