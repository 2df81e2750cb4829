from enum import StrEnum


class OutputFormat(StrEnum):
    """Formats in which results and reports are written.

    Attributes:
        CSV: One row per table cell, band or point; floats with 6 significant digits
        JSON: Self-describing document with exact (round-trip) floats
    """

    CSV = "csv"
    JSON = "json"

    @property
    def suffix(self) -> str:
        """File suffix conventionally used for this format."""
        return f".{self.value}"
