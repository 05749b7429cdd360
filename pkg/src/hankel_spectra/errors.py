"""Exception hierarchy shared by every module of the package."""


class HankelSpectraError(Exception):
    """Base class for all package errors."""


class DomainError(HankelSpectraError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(HankelSpectraError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``error_estimate`` carries the best error estimate achieved, when known.
    """

    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class CapacityError(HankelSpectraError):
    """A problem size exceeds a configured limit."""


class ConfigurationError(HankelSpectraError, ValueError):
    """A discretization or run configuration cannot deliver the requested accuracy."""


class ContractError(HankelSpectraError, ValueError):
    """An input violates a structural contract (e.g. a matrix is not symmetric)."""
