"""Exception hierarchy shared by every module of the package."""


class LMGError(Exception):
    """Base class for all package errors."""


class DomainError(LMGError, ValueError):
    """A parameter lies outside the domain where the model is defined."""

    def __init__(self, field, value, reason):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r}: {reason}")


class StabilityError(LMGError, ArithmeticError):
    """|epsilon| exceeded 1: the Bogoliubov transformation does not exist."""


class NoRootError(LMGError, RuntimeError):
    """No admissible displacement solves the stationarity condition."""


class SizeError(LMGError, ValueError):
    """Requested matrix dimension exceeds the configured limit."""


class ConvergenceError(LMGError, RuntimeError):
    """The dense eigensolver failed."""


class ConfigError(LMGError, ValueError):
    """Malformed sweep axis or run configuration."""


class InsufficientPoints(LMGError, ValueError):
    """Too few samples for a derivative or fit."""
