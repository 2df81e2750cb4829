from typing import Optional

from pydantic import ConfigDict, Field, field_validator
from typing_extensions import Annotated

from .ConditionalConfig import ConditionalConfig
from .Dgp import DEFAULT_DF, Dgp
from .JSONBaseModel import JSONBaseModel
from .QuantileGrid import QuantileGrid
from .ScheduleConfig import ScheduleConfig
from .SparsityMode import SparsityMode


class ExperimentPlan(JSONBaseModel):
    """Parameters of one Monte Carlo size study.

    The defaults reproduce the Gaussian setting with beta = 0.7 and n = 4000.
    The conditional fields are only read when ``dgp`` is the conditional process.

    Attributes:
        dgp: Data-generating process
        df: Degrees of freedom of the Student t process
        n: Observations per replication
        replications: Number of Monte Carlo replications
        beta: Learning-rate decay exponent
        c_gamma: Learning-rate scale
        a: Smoothing-width multiple; unset means 1, or max(1, 1/(4h)) in conditional mode
        initial_value: Starting iterate y
        grid: Quantile levels
        sparsity_mode: Known densities or kernel estimates
        alpha_levels: Nominal levels of the tests
        seed: Root seed of the data and of the critical-value simulation
        bridge_replications: Draws of the limiting maximum
        resimulate_critical: Draw fresh critical values for every replication
        eval_points: Regressor values of the conditional study
        bandwidth: Kernel bandwidth h of the conditional study
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    dgp: Dgp = Dgp.STANDARD_NORMAL
    df: Annotated[float, Field(gt=0)] = DEFAULT_DF
    n: Annotated[int, Field(gt=0)] = 4000
    replications: Annotated[int, Field(ge=1)] = 1000
    beta: Annotated[float, Field(gt=0.5, lt=1.0)] = 0.7
    c_gamma: Annotated[float, Field(gt=0)] = 1.0
    a: Optional[Annotated[float, Field(gt=0.5)]] = None
    initial_value: float = 0.0
    grid: QuantileGrid = Field(default_factory=QuantileGrid.deciles)
    sparsity_mode: SparsityMode = SparsityMode.KNOWN
    alpha_levels: Annotated[list[float], Field(min_length=1)] = [0.15, 0.10, 0.05, 0.01]
    seed: Annotated[int, Field(ge=0)] = 0
    bridge_replications: Annotated[int, Field(ge=1000)] = 100_000
    resimulate_critical: bool = False
    eval_points: Annotated[list[float], Field(min_length=1)] = [0.2, 0.4, 0.6, 0.8]
    bandwidth: Annotated[float, Field(gt=0)] = 0.2

    @field_validator('alpha_levels')
    def validate_alpha_levels(cls, value: list[float]) -> list[float]:
        for alpha in value:
            if not 0.0 < alpha < 1.0:
                raise ValueError(f"alpha level {alpha} is outside (0, 1)")
        return value

    @property
    def conditional(self) -> bool:
        return self.dgp.conditional

    def schedule(self) -> ScheduleConfig:
        """Learning-rate schedule of the plan, resolving an unset ``a``."""
        a = self.a
        if a is None:
            a = max(1.0, ConditionalConfig.minimum_a(self.bandwidth)) if self.conditional else 1.0
        return ScheduleConfig(c_gamma=self.c_gamma, beta=self.beta, a=a)

    def conditional_config(self) -> ConditionalConfig:
        return ConditionalConfig(eval_points=self.eval_points, bandwidth=self.bandwidth,
                                 grid=self.grid, schedule=self.schedule())
