from typing import Any, Optional

from pydantic import ConfigDict, Field

from .CoverageCell import CoverageCell
from .Dgp import Dgp
from .JSONBaseModel import JSONBaseModel


class CoverageTable(JSONBaseModel):
    """Empirical sizes of a study, one cell per (process, n, beta, alpha).

    Attributes:
        title: Short description of the study
        cells: Coverage cells in row-major order
    """

    model_config = ConfigDict(
        extra='forbid'
    )

    title: str = ""
    cells: list[CoverageCell] = Field(default_factory=list)

    def cell(self, n: int, beta: float, alpha: float, dgp: Optional[Dgp] = None) -> CoverageCell:
        """Looks up one cell.

        Raises:
            KeyError: If no cell matches
        """
        for cell in self.cells:
            if cell.n == n and cell.beta == beta and cell.alpha == alpha and dgp in (None, cell.dgp):
                return cell
        raise KeyError(f"no cell for n={n}, beta={beta}, alpha={alpha}")

    def extend(self, other: 'CoverageTable') -> 'CoverageTable':
        self.cells = [*self.cells, *other.cells]
        return self

    def to_csv_rows(self) -> list[dict[str, Any]]:
        return [
            {
                "dgp": cell.dgp.value,
                "sparsity": cell.sparsity_mode.value,
                "n": cell.n,
                "beta": cell.beta,
                "alpha": cell.alpha,
                "replications": cell.replications,
                "rejections": cell.rejections,
                "rate": cell.rate,
                "se": cell.standard_error,
                "reference": cell.reference,
            }
            for cell in self.cells
        ]

    def __str__(self) -> str:
        lines = [self.title] if self.title else []
        for cell in self.cells:
            reference = f" (reference {cell.reference:.3f})" if cell.reference is not None else ""
            lines.append(f"{cell.dgp.value} n={cell.n} beta={cell.beta:g} alpha={cell.alpha:g}: "
                         f"{cell.rate:.3f} +- {cell.standard_error:.3f}{reference}")
        return "\n".join(lines)
