"""Exception types shared across the pipeline."""

from __future__ import annotations


class TopicmeshError(Exception):
    """Base class for all errors raised by this package."""


class DataFormatError(TopicmeshError):
    """Invalid input data (CSV syntax, contract violations, referential gaps).

    ``line`` is the 1-based line number in the offending file when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} at line {line}"
        super().__init__(message)


class ModelError(TopicmeshError):
    """Operation on a hypergraph model with violated preconditions."""


class FilterError(TopicmeshError):
    """Inconsistent or out-of-range filter parameters."""


class GenerationError(TopicmeshError):
    """Synthetic dataset constraints are infeasible for the requested sizes."""


class InvariantError(TopicmeshError):
    """Internal consistency check failed; indicates a bug, not bad input."""
