import math
from typing import ClassVar

from pydantic import Field, ConfigDict
from typing_extensions import Annotated

from .JSONBaseModel import JSONBaseModel
from .errors import DomainError, warn


class ScheduleConfig(JSONBaseModel):
    """Learning-rate law and smoothing width of the smoothed SGD recursion.

    The k-th update uses the step size ``gamma_k = c_gamma * k ** -beta`` and
    smooths the quantile score over a window of half-width ``a * gamma_k``.

    Attributes:
        c_gamma: Step-size scale, strictly positive
        beta: Decay exponent in the open interval (1/2, 1)
        a: Smoothing-width multiple; must exceed 1/2 for the iterates to stay
            ordered in the quantile level
        smoothed: When False, the plain indicator score is used instead of the
            ramp (only meaningful for crossing comparisons)

    Examples:
        >>> cfg = ScheduleConfig(c_gamma=1.0, beta=0.7)
        >>> cfg.gamma(1)
        1.0
    """

    model_config = ConfigDict(
        frozen=True,
        extra='forbid'
    )

    # Upper end of the exponent range for which the Bahadur representation holds
    BAHADUR_BETA_LIMIT: ClassVar[float] = (1 + math.sqrt(5)) / 4

    c_gamma: Annotated[
        float,
        Field(
            description="Step-size scale c_gamma",
            gt=0,
            allow_inf_nan=False
        )
    ] = 1.0

    beta: Annotated[
        float,
        Field(
            description="Learning-rate decay exponent",
            gt=0.5,
            lt=1.0
        )
    ] = 0.7

    a: Annotated[
        float,
        Field(
            description="Smoothing-width multiple",
            gt=0.5,
            allow_inf_nan=False
        )
    ] = 1.0

    smoothed: bool = Field(
        default=True,
        description="Use the piecewise-linear smoothed score (False: plain indicator score)"
    )

    def flag_bahadur_range(self) -> None:
        """Warns when beta leaves the range required by the inference results.

        Tail bounds only need beta in (1/2, 1); the Bahadur representation and the
        Gaussian approximation additionally need beta < (1 + sqrt(5)) / 4.
        """
        if not self.satisfies_bahadur_condition:
            warn(
                "beta is outside (1/2, (1+sqrt(5))/4); simultaneous inference is not backed "
                "by the Gaussian approximation",
                beta=self.beta
            )

    @property
    def satisfies_bahadur_condition(self) -> bool:
        """True when beta lies below (1 + sqrt(5)) / 4."""
        return self.beta < self.BAHADUR_BETA_LIMIT

    def gamma(self, k: int) -> float:
        """Returns the learning rate of the k-th update.

        Args:
            k: Update index, starting at 1

        Returns:
            float: ``c_gamma * k ** -beta``

        Raises:
            DomainError: If k is smaller than 1
        """
        if k < 1:
            raise DomainError(f"step index must be >= 1, got {k}", field="k")
        return self.c_gamma * float(k) ** -self.beta

    def smoothing_width(self, k: int) -> float:
        """Returns the half-width ``a * gamma_k`` of the smoothing window at step k."""
        return self.a * self.gamma(k)

    def __str__(self) -> str:
        kind = "smoothed" if self.smoothed else "plain"
        return f"gamma_k = {self.c_gamma:g} k^-{self.beta:g}, a = {self.a:g} ({kind})"
