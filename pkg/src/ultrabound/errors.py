"""Exception types raised across the package."""


class UltraboundError(ValueError):
    """Base class for invalid-input errors."""


class InvalidDimensionError(UltraboundError):
    pass


class InvalidIndexError(UltraboundError):
    pass


class DegenerateIndexError(UltraboundError):
    pass


class DomainError(UltraboundError):
    pass


class UndefinedXbarError(UltraboundError):
    pass


class WrongRegimeError(UltraboundError):
    pass


class UnsupportedRangeError(UltraboundError):
    pass


class ScaledUnderflowError(ArithmeticError):
    pass


class ConvergenceError(ArithmeticError):
    """Root finding failed; carries the last residual."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class ConfigError(UltraboundError):
    """Invalid sweep configuration or configuration file."""
