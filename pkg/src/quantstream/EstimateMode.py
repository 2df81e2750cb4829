from enum import StrEnum


class EstimateMode(StrEnum):
    """Which iterate of the SGD recursion to report.

    Attributes:
        RAW: The last SGD iterate Y_k
        AVERAGED: The Polyak-Ruppert running mean of the iterates
    """

    RAW = "raw"
    AVERAGED = "averaged"

    @property
    def description(self) -> str:
        """Human-readable description of the estimate."""
        return {
            EstimateMode.RAW: "Last SGD iterate",
            EstimateMode.AVERAGED: "Polyak-Ruppert average of the SGD iterates",
        }[self]
