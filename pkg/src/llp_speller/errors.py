"""
Exceptions
==========
Error types raised across llp-speller.

Everything derives from :class:`LLPError`, and each class additionally
inherits the builtin it refines, so ``except ValueError`` keeps working for
callers that do not know about this package.

The CLI maps these to exit codes: input problems exit with 2, generation and
convergence failures with 3.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any


class LLPError(Exception):
    """Base class for all llp-speller errors."""


class SingularMixingError(LLPError, ValueError):
    """The mixing matrix has rank < 2, so class means cannot be recovered."""


class InsufficientDataError(LLPError, ValueError):
    """Not enough samples (empty group, single class, too few epochs)."""


class DimensionMismatchError(LLPError, ValueError):
    """Feature dimensions or epoch/stimulus alignment disagree."""


class GenerationError(LLPError, RuntimeError):
    """Sequence or trial generation ran out of retries."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.diagnostics: dict[str, Any] = diagnostics or {}


class ConvergenceError(LLPError, RuntimeError):
    """An iterative search (SNR calibration) did not reach its target."""


class FormatError(LLPError, ValueError):
    """Malformed input file."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None) -> None:
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.path = Path(path) if path is not None else None
        self.line = line
