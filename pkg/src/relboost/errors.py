"""Exception types shared across the package."""

from __future__ import annotations


class RelboostError(Exception):
    """Base class for all package-specific errors."""


class ParseError(RelboostError):
    """Raised when a text artifact (schema, facts, examples, ...) is malformed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaError(RelboostError):
    """Raised when predicates, arities or argument types are inconsistent."""


class DataError(RelboostError):
    """Raised for malformed records or impossible sampling requests."""


class TrainingError(RelboostError):
    """Raised when model training cannot proceed."""


class ConfigError(RelboostError):
    """Raised for invalid configuration values."""
