from typing import Any, ClassVar, Optional

import numpy as np
from pydantic import ConfigDict, Field, PrivateAttr, field_serializer, field_validator, model_validator

from .JSONBaseModel import JSONBaseModel
from .errors import InputError


class ReservoirSample(JSONBaseModel):
    """Fixed-capacity uniform sample of a stream of observation vectors.

    Keeps every observation seen so far with equal probability
    ``capacity / seen`` (reservoir sampling, Algorithm R). Memory stays
    bounded by ``capacity`` rows whatever the stream length, and the
    generator state is part of the JSON form so checkpoints resume exactly.

    Attributes:
        capacity: Maximum number of rows kept
        width: Number of values per observation
        seen: Number of observations offered so far
        rows: Retained observations, at most ``capacity`` x ``width``
        rng_state: Serialized PCG64 state of the replacement generator
    """

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        validate_assignment=False,
        extra='forbid'
    )

    DEFAULT_CAPACITY: ClassVar[int] = 4096

    capacity: int = Field(default=DEFAULT_CAPACITY, gt=0)
    width: int = Field(default=1, gt=0)
    seen: int = Field(default=0, ge=0)
    rows: np.ndarray = Field(default_factory=lambda: np.empty((0, 1)))
    rng_state: Optional[dict[str, Any]] = None

    _rng: np.random.Generator = PrivateAttr()
    _buffer: Optional[np.ndarray] = PrivateAttr(default=None)

    @field_validator('rows', mode='before')
    def coerce_rows(cls, value) -> np.ndarray:
        return np.array(value, dtype=float)

    @model_validator(mode='after')
    def validate_rows(self) -> 'ReservoirSample':
        if self.rows.size and (self.rows.ndim != 2 or self.rows.shape[1] != self.width):
            raise ValueError(f"rows must have {self.width} columns")
        if self.rows.shape[0] > self.capacity:
            raise ValueError(f"reservoir holds at most {self.capacity} rows, got {self.rows.shape[0]}")
        return self

    @field_serializer('rows')
    def serialize_rows(self, value: np.ndarray) -> list:
        return value.tolist()

    @field_serializer('rng_state')
    def serialize_rng_state(self, value: Optional[dict[str, Any]]) -> dict[str, Any]:
        return self._rng.bit_generator.state

    def model_post_init(self, __context: Any) -> None:
        bit_generator = np.random.PCG64()
        if self.rng_state is not None:
            bit_generator.state = self.rng_state
        self._rng = np.random.Generator(bit_generator)
        if self.rows.size == 0:
            self.rows = np.empty((0, self.width))

    @classmethod
    def create(cls, width: int, seed: int, capacity: int = DEFAULT_CAPACITY) -> 'ReservoirSample':
        """Creates an empty reservoir whose replacement draws are seeded by ``seed``."""
        state = np.random.PCG64(seed).state
        return cls(capacity=capacity, width=width, rng_state=state)

    def offer(self, observation: np.ndarray) -> None:
        """Offers one observation vector to the reservoir."""
        vector = np.asarray(observation, dtype=float).reshape(-1)
        if vector.shape != (self.width,):
            raise InputError(f"expected {self.width} values, got {vector.size}", field="observation")
        self.seen += 1
        filled = self.rows.shape[0]
        if filled < self.capacity:
            buffer = self._allocate()
            buffer[filled] = vector
            self.rows = buffer[:filled + 1]
        else:
            slot = int(self._rng.integers(0, self.seen))
            if slot < self.capacity:
                self.rows[slot] = vector

    def _allocate(self) -> np.ndarray:
        if self._buffer is None:
            self._buffer = np.empty((self.capacity, self.width))
            self._buffer[:self.rows.shape[0]] = self.rows
            self.rows = self._buffer[:self.rows.shape[0]]
        return self._buffer

    def column(self, index: int) -> np.ndarray:
        """Returns the retained values of one series."""
        return self.rows[:, index].copy()

    def __len__(self) -> int:
        return int(self.rows.shape[0])
