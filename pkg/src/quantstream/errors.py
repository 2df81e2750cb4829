"""Exception and warning types raised by quantstream.

Every error carries the structured context needed to report it (the offending
field, the observation index or the input line) and renders its message from
that context, so callers such as the CLI can map them to exit codes without
parsing text.
"""
import logging
import warnings
from typing import Any, Optional

import numpy as np

logger = logging.getLogger(__name__)


class QuantStreamError(Exception):
    """Base class for all quantstream errors."""

    def __init__(self, reason: str, *, field: Optional[str] = None,
                 index: Optional[int] = None, line: Optional[int] = None):
        self.reason = reason
        self.field = field
        self.index = index
        self.line = line
        super().__init__(self._format_message())

    def _format_message(self) -> str:
        parts = []
        if self.line is not None:
            parts.append(f"line {self.line}")
        if self.index is not None:
            parts.append(f"observation {self.index}")
        if self.field is not None:
            parts.append(f"field '{self.field}'")
        prefix = ", ".join(parts)
        return f"{prefix}: {self.reason}" if prefix else self.reason

    def with_index(self, index: int) -> 'QuantStreamError':
        """Returns a copy of this error pinned to an observation index."""
        return type(self)(self.reason, field=self.field, index=index, line=self.line)

    def with_line(self, line: int) -> 'QuantStreamError':
        """Returns a copy of this error pinned to a 1-based input line."""
        return type(self)(self.reason, field=self.field, index=self.index, line=line)


class DomainError(QuantStreamError, ValueError):
    """An argument lies outside the domain of a mathematical function."""


class ConfigError(QuantStreamError, ValueError):
    """A configuration record is invalid."""


class InputError(QuantStreamError, ValueError):
    """Observations or data files are malformed (wrong shape, non-finite, empty)."""


class NumericError(QuantStreamError, ArithmeticError):
    """A numerical procedure failed (indefinite covariance, zero bandwidth, quadrature)."""


class QuantStreamWarning(UserWarning):
    """Condition that is accepted but weakens the guarantees of the procedure."""


def warn(message: str, **context: Any) -> None:
    """Emits a QuantStreamWarning and logs it.

    Args:
        message: Human-readable description of the flagged condition
        **context: Extra key/value pairs appended to the log record
    """
    if context:
        details = ", ".join(f"{key}={value!r}" for key, value in context.items())
        logger.warning("%s (%s)", message, details)
    else:
        logger.warning(message)
    warnings.warn(message, QuantStreamWarning, stacklevel=3)


def require_finite(name: str, value: Any) -> None:
    """Raises DomainError when a scalar or array holds NaN or infinity."""
    if not np.all(np.isfinite(value)):
        raise DomainError("value must be finite", field=name)
