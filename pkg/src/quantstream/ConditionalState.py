import logging
from typing import Iterable

import numpy as np
from pydantic import ConfigDict, Field, field_serializer, field_validator, model_validator

from .ConditionalConfig import ConditionalConfig
from .EstimateMode import EstimateMode
from .JSONBaseModel import JSONBaseModel
from .ScheduleConfig import ScheduleConfig
from .errors import InputError
from .score import running_average, schedule_increment

logger = logging.getLogger(__name__)


def uniform_kernel(u: np.ndarray) -> np.ndarray:
    """Uniform kernel ``K(u) = 1/2 * 1{|u| <= 1}``."""
    return np.where(np.abs(u) <= 1.0, 0.5, 0.0)


def kernel_weight(eval_points: np.ndarray, x, bandwidth: float) -> np.ndarray:
    """Weights ``h^-1 K((x_i - x) / h)``; a leading axis of ``x`` is kept in front of the points."""
    x = np.asarray(x, dtype=float)
    return uniform_kernel((eval_points - x[..., None]) / bandwidth) / bandwidth


def conditional_step(iterates: np.ndarray, averaged: np.ndarray, step: int, x, y,
                     eval_points: np.ndarray, levels: np.ndarray, schedule: ScheduleConfig,
                     bandwidth: float) -> tuple[np.ndarray, np.ndarray]:
    """One kernel-weighted smoothed SGD update of every (evaluation point, level) iterate.

    ``iterates`` and ``averaged`` have shape ``(..., |points|, |grid|)`` and ``x``, ``y``
    the leading shape ``(...)``, so independent streams can be advanced together.

    Returns:
        The new iterates and averaged iterates after update number ``step``
    """
    y = np.asarray(y, dtype=float)
    weight = kernel_weight(eval_points, x, bandwidth)[..., None]
    increment = schedule_increment(schedule, step, iterates, y[..., None, None], levels)
    updated = iterates + increment * weight
    return updated, running_average(averaged, updated, step)


class ConditionalState(JSONBaseModel):
    """Streaming local-constant estimate of the conditional quantiles m(x_i, tau).

    Attributes:
        config: Evaluation points, bandwidth, grid and schedule
        step: Number of (x, y) pairs consumed
        iterates: |points| x |grid| matrix of current iterates Z_{i,k}(tau)
        averaged: |points| x |grid| running means of the iterates
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        validate_assignment=False,
        extra='forbid'
    )

    config: ConditionalConfig
    step: int = Field(default=0, ge=0)
    iterates: np.ndarray
    averaged: np.ndarray

    @field_validator('iterates', 'averaged', mode='before')
    def coerce_array(cls, value) -> np.ndarray:
        return np.array(value, dtype=float)

    @field_serializer('iterates', 'averaged')
    def serialize_array(self, value: np.ndarray) -> list:
        return value.tolist()

    @model_validator(mode='after')
    def validate_surfaces(self) -> 'ConditionalState':
        shape = (len(self.config.eval_points), len(self.config.grid))
        for name in ('iterates', 'averaged'):
            surface = getattr(self, name)
            if surface.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {surface.shape}")
            if np.any(np.diff(surface, axis=1) < 0):
                raise ValueError(f"{name} rows must be non-decreasing in the quantile level")
        return self

    @classmethod
    def init(cls, config: ConditionalConfig, initial_value: float = 0.0) -> 'ConditionalState':
        """Creates a state at step 0 with every iterate equal to ``initial_value``."""
        config.schedule.flag_bahadur_range()
        start = np.full((len(config.eval_points), len(config.grid)), float(initial_value))
        return cls(config=config, iterates=start, averaged=start.copy())

    def cond_update(self, x: float, y: float) -> 'ConditionalState':
        """Consumes one (regressor, response) pair.

        Evaluation points outside the kernel window keep their iterates but still
        enter the running average.

        Raises:
            InputError: If x or y is not finite; the state is left unchanged
        """
        if not (np.isfinite(x) and np.isfinite(y)):
            raise InputError("x and y must be finite", field="observation")
        step = self.step + 1
        self.iterates, self.averaged = conditional_step(
            self.iterates, self.averaged, step, float(x), float(y),
            self.config.points, self.config.grid.array, self.config.schedule, self.config.bandwidth
        )
        self.step = step
        return self

    def merge_stream(self, pairs: Iterable[tuple[float, float]]) -> 'ConditionalState':
        """Folds ``cond_update`` over (x, y) pairs; errors carry the pair index."""
        for index, (x, y) in enumerate(pairs):
            try:
                self.cond_update(x, y)
            except InputError as e:
                raise e.with_index(index) from e
        return self

    def estimates(self, mode: EstimateMode | str = EstimateMode.AVERAGED) -> np.ndarray:
        """Returns a copy of the requested |points| x |grid| surface."""
        mode = EstimateMode(mode)
        return (self.iterates if mode == EstimateMode.RAW else self.averaged).copy()
