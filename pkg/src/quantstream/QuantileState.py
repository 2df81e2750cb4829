import logging
from typing import Any, ClassVar, Iterable, Optional, Sequence

import numpy as np
from pydantic import (ConfigDict, Field, ValidationError, field_serializer, field_validator,
                      model_validator)

from .EstimateMode import EstimateMode
from .JSONBaseModel import JSONBaseModel
from .QuantileGrid import QuantileGrid
from .ScheduleConfig import ScheduleConfig
from .errors import ConfigError, InputError
from .score import running_average, schedule_increment

logger = logging.getLogger(__name__)


class QuantileState(JSONBaseModel):
    """Streaming estimator of several quantiles of several synchronized series.

    Row ``i`` of ``raw`` holds the SGD iterates Y_{i,k}(tau) of series ``i`` for
    every level of the grid; ``averaged`` holds their Polyak-Ruppert means.
    Both matrices stay non-decreasing along each row after every update.

    The state is single-writer: ``update`` mutates it in place and returns it.
    Its JSON form is the checkpoint snapshot used by the CLI.

    Attributes:
        version: Snapshot layout version
        series_count: Number of series p
        grid: Quantile levels
        schedule: Learning-rate schedule
        step: Number of observations consumed
        initial_values: Starting value y_i of each series
        raw: p x |grid| matrix of current iterates
        averaged: p x |grid| matrix of averaged iterates
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        validate_assignment=False,
        extra='forbid'
    )

    SNAPSHOT_VERSION: ClassVar[int] = 1

    version: int = Field(default=1, description="Snapshot layout version")
    series_count: int = Field(..., gt=0, description="Number of series p")
    grid: QuantileGrid
    schedule: ScheduleConfig
    step: int = Field(default=0, ge=0, description="Observations consumed")
    initial_values: np.ndarray
    raw: np.ndarray
    averaged: np.ndarray

    @field_validator('initial_values', 'raw', 'averaged', mode='before')
    def coerce_array(cls, value) -> np.ndarray:
        return np.array(value, dtype=float)

    @field_serializer('initial_values', 'raw', 'averaged')
    def serialize_array(self, value: np.ndarray) -> list:
        return value.tolist()

    @field_validator('version')
    def validate_version(cls, value: int) -> int:
        if value != cls.SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {value}")
        return value

    @model_validator(mode='after')
    def validate_matrices(self) -> 'QuantileState':
        """Checks shapes, finiteness and row monotonicity of the iterate matrices.

        Raises:
            ValueError: If any invariant of the state is violated
        """
        shape = (self.series_count, len(self.grid))
        if self.initial_values.shape != (self.series_count,):
            raise ValueError(f"initial_values must have shape ({self.series_count},)")
        for name in ('raw', 'averaged'):
            matrix = getattr(self, name)
            if matrix.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {matrix.shape}")
            if not np.all(np.isfinite(matrix)):
                raise ValueError(f"{name} must be finite")
            if self.schedule.smoothed and np.any(np.diff(matrix, axis=1) < 0):
                raise ValueError(f"{name} rows must be non-decreasing in the quantile level")
        if not np.all(np.isfinite(self.initial_values)):
            raise ValueError("initial_values must be finite")
        return self

    @classmethod
    def init(cls, series_count: int, grid: QuantileGrid | Sequence[float],
             schedule: Optional[ScheduleConfig] = None,
             initial_values: Optional[Sequence[float]] = None) -> 'QuantileState':
        """Creates a state at step 0 with every iterate equal to its series' initial value.

        Args:
            series_count: Number of series p
            grid: Quantile grid or a sequence of levels
            schedule: Learning-rate schedule, defaults to ``ScheduleConfig()``
            initial_values: One starting value per series, defaults to zeros

        Returns:
            QuantileState: Fresh state with ``raw == averaged``

        Raises:
            ConfigError: If the grid is empty or invalid, or the initial values are
                non-finite or of the wrong length
        """
        try:
            if not isinstance(grid, QuantileGrid):
                grid = QuantileGrid.of(grid)
            schedule = schedule if schedule is not None else ScheduleConfig()
            schedule.flag_bahadur_range()
            if initial_values is None:
                initial = np.zeros(series_count, dtype=float)
            else:
                initial = np.array(initial_values, dtype=float).reshape(-1)
            if initial.shape != (series_count,):
                raise ConfigError(f"expected {series_count} initial values, got {initial.size}",
                                  field="initial_values")
            if not np.all(np.isfinite(initial)):
                raise ConfigError("initial values must be finite", field="initial_values")
            start = np.repeat(initial[:, None], len(grid), axis=1)
            return cls(series_count=series_count, grid=grid, schedule=schedule,
                       initial_values=initial, raw=start, averaged=start.copy())
        except ValidationError as e:
            error = e.errors()[0]
            field = ".".join(str(part) for part in error["loc"]) or None
            raise ConfigError(error["msg"], field=field) from e

    @property
    def levels(self) -> np.ndarray:
        return self.grid.array

    def _check_observation(self, observation) -> np.ndarray:
        vector = np.asarray(observation, dtype=float).reshape(-1)
        if vector.shape != (self.series_count,):
            raise InputError(f"expected {self.series_count} values, got {vector.size}",
                             field="observation")
        if not np.all(np.isfinite(vector)):
            raise InputError("observation must be finite", field="observation")
        return vector

    def _advance(self, vector: np.ndarray) -> None:
        step = self.step + 1
        raw = self.raw + schedule_increment(self.schedule, step, self.raw,
                                            vector[:, None], self.levels)
        self.averaged = running_average(self.averaged, raw, step)
        self.raw = raw
        self.step = step

    def update(self, observation: Sequence[float] | np.ndarray | float) -> 'QuantileState':
        """Consumes one synchronized observation vector (one value per series).

        The k-th update applies ``Y + gamma_k * (tau - g_{a gamma_k}(Y - X))`` to every
        level and folds the new iterate into the running average.

        Args:
            observation: p finite values (a scalar is accepted when p == 1)

        Returns:
            QuantileState: This state, advanced by one step

        Raises:
            InputError: If the observation has the wrong length or is not finite; the
                state is left unchanged
        """
        self._advance(self._check_observation(observation))
        return self

    def merge_stream(self, observations: Iterable) -> 'QuantileState':
        """Folds ``update`` over a sequence of observations, in order.

        All observations are checked before the first one is applied, so a bad
        entry leaves the state untouched.

        Raises:
            InputError: Carrying the 0-based index of the first offending observation
        """
        vectors = []
        for index, observation in enumerate(observations):
            try:
                vectors.append(self._check_observation(observation))
            except InputError as e:
                raise e.with_index(index) from e
        for vector in vectors:
            self._advance(vector)
        logger.debug("Consumed %d observations, step is now %d", len(vectors), self.step)
        return self

    def merge_array(self, observations: np.ndarray) -> 'QuantileState':
        """Fast path of ``merge_stream`` for an ``n x p`` array of observations."""
        matrix = np.asarray(observations, dtype=float)
        if matrix.ndim == 1 and self.series_count == 1:
            matrix = matrix[:, None]
        if matrix.ndim != 2 or matrix.shape[1] != self.series_count:
            raise InputError(f"expected an n x {self.series_count} array", field="observations")
        finite = np.isfinite(matrix).all(axis=1)
        if not finite.all():
            raise InputError("observation must be finite", index=int(np.argmin(finite)))
        for vector in matrix:
            self._advance(vector)
        return self

    def estimates(self, mode: EstimateMode | str = EstimateMode.AVERAGED) -> np.ndarray:
        """Returns a copy of the requested p x |grid| iterate matrix."""
        mode = EstimateMode(mode)
        return (self.raw if mode == EstimateMode.RAW else self.averaged).copy()

    def crossings(self, mode: EstimateMode | str = EstimateMode.RAW) -> np.ndarray:
        """Counts, per series, the adjacent levels whose estimates are out of order."""
        return (np.diff(self.estimates(mode), axis=1) < 0).sum(axis=1)

    def copy(self) -> 'QuantileState':
        return self.model_copy(deep=True)

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [
            {"series": i, "tau": tau, "raw": float(self.raw[i, j]),
             "averaged": float(self.averaged[i, j]), "step": self.step}
            for i in range(self.series_count)
            for j, tau in enumerate(self.grid.levels)
        ]

    def __str__(self) -> str:
        return (f"QuantileState(p={self.series_count}, grid={self.grid}, step={self.step}, "
                f"schedule=[{self.schedule}])")
