"""Exception types raised across the package."""

from __future__ import annotations


class InvalidArgumentError(ValueError):
    """Bad index, shape, range or configuration value."""


class CapacityError(InvalidArgumentError):
    """Problem size exceeds what a dense routine will allocate."""


class DegenerateNormalizationError(ArithmeticError):
    """Zero-frequency magnitude too small to normalize by."""


class UndefinedStatisticError(ArithmeticError):
    """Statistic is undefined for the given sample (e.g. zero variance)."""
