from enum import StrEnum


class SparsityMode(StrEnum):
    """How the sparsity f(Q(tau)) entering the test statistic is obtained.

    Attributes:
        KNOWN: Evaluated from the known data-generating distribution
        KDE: Estimated by Gaussian kernel density estimation
    """

    KNOWN = "known"
    KDE = "kde"

    @property
    def description(self) -> str:
        """Human-readable description of the mode."""
        return {
            SparsityMode.KNOWN: "Density of the known distribution at the true quantile",
            SparsityMode.KDE: "Gaussian kernel density estimate at the estimated quantile",
        }[self]
