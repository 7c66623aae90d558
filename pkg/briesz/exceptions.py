"""
Custom exceptions for briesz.
"""


class BrieszError(Exception):
    """Base exception for briesz."""

    pass


class DomainError(BrieszError, ValueError):
    """Raised when an argument lies outside the domain of an operation."""

    pass


class EmptyIntervalError(DomainError):
    """Raised when an infimum is requested over an empty exponent interval."""

    pass


class ScalingRelationError(DomainError):
    """Raised when exponents violate 1 + 1/r = 1/p + 1/q."""

    pass


class GridMismatchError(BrieszError, ValueError):
    """Raised when grid functions live on different grids."""

    pass


class NumericalGuardError(BrieszError):
    """Raised when a numerical guard refuses to compute."""

    pass


class NyquistError(NumericalGuardError):
    """Raised when a multiplier radius approaches the grid Nyquist radius."""

    pass


class AdmissibilityError(NumericalGuardError, DomainError):
    """Raised when exponents fall outside the admissible region of the bounds."""

    pass


class ConfigurationError(BrieszError):
    """Raised when configuration is invalid."""

    pass


class GridFunctionFormatError(ConfigurationError):
    """Raised when a grid function file is malformed."""

    pass
