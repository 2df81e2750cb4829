import re
from pathlib import Path
from typing import Literal, Optional

from pydantic import ConfigDict, Field, field_validator
from scipy import stats
from typing_extensions import Annotated

from .Dgp import DEFAULT_DF, Dgp
from .JSONBaseModel import JSONBaseModel
from .OutputFormat import OutputFormat
from .QuantileGrid import QuantileGrid
from .ScheduleConfig import ScheduleConfig
from .SparsityMode import SparsityMode

SPARSITY_PATTERN = re.compile(r"^(kde|known:(normal|t(\d+(\.\d+)?)))$")


def _split(value):
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


class RunConfig(JSONBaseModel):
    """Validated options of one CLI invocation.

    Built from the parsed command line before anything is computed; a
    validation failure names the offending flag.

    Attributes:
        command: Subcommand name
        beta: Learning-rate decay exponent
        c_gamma: Learning-rate scale
        a: Smoothing-width multiple, defaulting to 1
        grid: Quantile levels
        alpha: Level of tests and bands
        seed: Seed of every random draw
        reps: Monte Carlo replications
        sizes: Sample sizes of a reproduced table
        sparsity: ``kde`` or ``known:<distribution>`` with distribution ``normal`` or ``t<df>``
        bridge_reps: Draws of the limiting maximum
        input: Data file; standard input when omitted
        output: Result file; standard output when omitted
        format: Output format
        checkpoint: Where ``stream`` writes its resumable state
        resume: Checkpoint that ``stream`` starts from
        infer: Whether ``stream`` tests the quantiles in ``null``
        null: CSV file of null quantiles, one row per series
        preset: Study run by ``reproduce``
        dgp: Data-generating process of ``qq`` and ``tail``
        df: Degrees of freedom of the Student t process
        n: Sample size of ``qq`` and ``tail``
        tau: Quantile level of ``tail``
        x: Thresholds of ``tail``
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    command: Literal["stream", "bands", "reproduce", "qq", "tail"]
    beta: Annotated[float, Field(gt=0.5, lt=1.0)] = 0.7
    c_gamma: Annotated[float, Field(gt=0)] = 1.0
    a: Optional[Annotated[float, Field(gt=0.5)]] = None
    grid: QuantileGrid = Field(default_factory=QuantileGrid.deciles)
    alpha: Annotated[float, Field(gt=0, lt=1)] = 0.05
    seed: Annotated[int, Field(ge=0)] = 0
    reps: Optional[Annotated[int, Field(ge=1)]] = None
    sizes: Optional[list[Annotated[int, Field(gt=0)]]] = None
    sparsity: Optional[str] = None
    bridge_reps: Annotated[int, Field(ge=1000)] = 100_000
    input: Optional[Path] = None
    output: Optional[Path] = None
    format: OutputFormat = OutputFormat.JSON
    checkpoint: Optional[Path] = None
    resume: Optional[Path] = None
    infer: bool = False
    null: Optional[Path] = None
    preset: Optional[str] = None
    dgp: Dgp = Dgp.STANDARD_NORMAL
    df: Annotated[float, Field(gt=0)] = DEFAULT_DF
    n: Optional[Annotated[int, Field(gt=0)]] = None
    tau: Annotated[float, Field(gt=0, lt=1)] = 0.5
    x: Optional[list[float]] = None

    @field_validator('grid', mode='before')
    def parse_grid(cls, value):
        return QuantileGrid.parse(value) if isinstance(value, str) else value

    @field_validator('sizes', 'x', mode='before')
    def parse_list(cls, value):
        return _split(value)

    @field_validator('sparsity')
    def validate_sparsity(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and not SPARSITY_PATTERN.match(value):
            raise ValueError("sparsity must be 'kde', 'known:normal' or 'known:t<df>'")
        return value

    def schedule(self) -> ScheduleConfig:
        return ScheduleConfig(c_gamma=self.c_gamma, beta=self.beta, a=self.a if self.a is not None else 1.0)

    def sparsity_mode(self, default: SparsityMode) -> SparsityMode:
        """Mode selected by ``--sparsity``, or ``default`` when the flag is absent."""
        if self.sparsity is None:
            return default
        return SparsityMode.KDE if self.sparsity == "kde" else SparsityMode.KNOWN

    def known_distribution(self):
        """Frozen scipy distribution named by ``known:<distribution>``; standard normal by default."""
        match = SPARSITY_PATTERN.match(self.sparsity or "known:normal")
        if match.group(3) is not None:
            return stats.t(float(match.group(3)))
        return stats.norm()
