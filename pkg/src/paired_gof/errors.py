"""paired_gof custom exceptions."""
from __future__ import annotations


class PairedGofError(Exception):
    """Base class for every error raised by paired_gof."""


class ParseError(PairedGofError):
    """Raised when an input file cannot be parsed."""


class DataValidationError(PairedGofError):
    """Raised when a frequency table violates an invariant."""

    def __init__(self, message: str, group_index: int | None = None) -> None:
        self.group_index = group_index
        if group_index is not None:
            message = f"{message} (group {group_index})"
        super().__init__(message)


class ConfigurationError(PairedGofError):
    """Raised for invalid configuration or scenario definitions."""


class UsageError(PairedGofError):
    """Raised for invalid command-line usage."""


class NumericalError(PairedGofError):
    """Base class for numerical failures (CLI exit status 2)."""


class DomainError(NumericalError):
    """Raised when a nuisance value lies outside its admissible region."""


class SingularPointError(NumericalError):
    """Raised when a derivative is evaluated where a denominator vanishes."""


class NoAdmissibleRootError(NumericalError):
    """Raised when a normal equation has no usable root in (0, 1)."""


class SingularHessianError(NumericalError):
    """Raised when the second derivative in the nuisance parameter is zero."""


class UnidentifiableError(NumericalError):
    """Raised when the nuisance parameter cannot be estimated from the data."""


class ConvergenceError(NumericalError):
    """Raised when an estimate required downstream did not converge."""


class DegreesOfFreedomError(NumericalError):
    """Raised when the asymptotic reference distribution is undefined."""


class BootstrapError(NumericalError):
    """Raised when a bootstrap run cannot produce a p-value."""
