"""Exception types shared across the solvers."""
from __future__ import annotations


class OscenvError(Exception):
    """Base class for all package errors."""


class ConfigError(OscenvError, ValueError):
    """A physical or numerical parameter is out of its admissible range."""


class CflError(OscenvError, ValueError):
    """An explicit-scheme stability bound is violated.

    Carries the largest admissible step so callers can retry.
    """

    def __init__(self, message: str, max_dt: float | None = None):
        super().__init__(message)
        self.max_dt = max_dt


class StabilityError(OscenvError, RuntimeError):
    """Non-finite values appeared while time stepping."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class MassError(OscenvError, ValueError):
    """A field integral is degenerate where a normalization is required."""


class DomainError(OscenvError, ValueError):
    """A requested evaluation lies outside the admissible domain."""


class GridMismatchError(OscenvError, ValueError):
    """Two operands are defined on different grids."""


class FileFormatError(OscenvError, ValueError):
    """An on-disk artifact does not parse under its documented format."""
