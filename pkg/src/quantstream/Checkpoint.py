from typing import ClassVar

from pydantic import ConfigDict, Field, field_validator, model_validator

from .JSONBaseModel import JSONBaseModel
from .QuantileState import QuantileState
from .ReservoirSample import ReservoirSample


class Checkpoint(JSONBaseModel):
    """Resumable state of a ``stream`` run.

    Attributes:
        version: Checkpoint layout version
        state: Estimator snapshot
        reservoir: Uniform sample of the stream, used for kernel density estimates
    """

    model_config = ConfigDict(
        extra='forbid'
    )

    CHECKPOINT_VERSION: ClassVar[int] = 1

    version: int = Field(default=1)
    state: QuantileState
    reservoir: ReservoirSample

    @field_validator('version')
    def validate_version(cls, value: int) -> int:
        if value != cls.CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {value}")
        return value

    @model_validator(mode='after')
    def validate_width(self) -> 'Checkpoint':
        if self.reservoir.width != self.state.series_count:
            raise ValueError("reservoir width must equal the number of series")
        return self
