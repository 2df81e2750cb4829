import csv
import io
import json
from pathlib import Path
from typing import Any, Self

from pydantic import BaseModel, ConfigDict

from .OutputFormat import OutputFormat


class JSONBaseModel(BaseModel):
    """Base class for quantstream records that are written to disk.

    Provides exact JSON round-tripping and optional CSV export. JSON goes
    through the standard ``json`` module so every float is written with its
    shortest round-trip representation and parsed back bit-identically.

    Child classes that have a tabular view override ``to_csv_rows``.
    """

    model_config = ConfigDict(
        validate_assignment=True,
        frozen=False,
        extra='forbid'
    )

    def to_json(self, indent: int | None = 2) -> str:
        """Serializes the model to a JSON string.

        Args:
            indent: Indentation width, or None for a compact single line

        Returns:
            str: JSON document holding every field of the model
        """
        return json.dumps(self.model_dump(mode="json"), indent=indent, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> Self:
        """Creates a model instance from a JSON string.

        Args:
            text: JSON document produced by ``to_json``

        Returns:
            The validated model instance
        """
        return cls.model_validate(json.loads(text))

    def save(self, path: Path | str) -> None:
        """Writes the JSON representation to ``path``."""
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> Self:
        """Reads a model previously written by ``save``."""
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_csv_rows(self) -> list[dict[str, Any]]:
        """Returns the tabular view of the model, one dict per CSV row.

        Raises:
            NotImplementedError: This base implementation always raises
        """
        raise NotImplementedError("CSV export not implemented")

    def to_csv(self) -> str:
        """Renders ``to_csv_rows`` as CSV text with 6 significant digits for floats."""
        rows = self.to_csv_rows()
        buffer = io.StringIO()
        if not rows:
            return ""
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _format_cell(value) for key, value in row.items()})
        return buffer.getvalue()

    def render(self, fmt: OutputFormat) -> str:
        """Renders the model in the requested output format."""
        if fmt == OutputFormat.CSV:
            return self.to_csv()
        return self.to_json() + "\n"

    def __str__(self) -> str:
        """Returns a human-readable string representation.

        Returns:
            str: String representation showing scalar model attributes
        """
        attrs = []
        for name, value in self.__dict__.items():
            if not name.startswith('_') and value is not None and not hasattr(value, "shape"):
                attrs.append(f"{name}={value!r}")
        return f"{self.__class__.__name__}({', '.join(attrs)})"


def _format_cell(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return f"{value:.6g}"
    return value
