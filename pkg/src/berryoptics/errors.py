"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from
:class:`BerryOpticsError`; the CLI maps :class:`ConfigError` and
:class:`DomainError` to exit status 2 and :class:`NumericalError` to 3.
"""

from __future__ import annotations


class BerryOpticsError(Exception):
    """Base class for all toolkit errors."""


class DomainError(BerryOpticsError, ValueError):
    """An argument lies outside the domain of an operation."""


class ParameterMismatchError(DomainError):
    """Two zones do not satisfy the cancellation preconditions."""


class ConfigError(BerryOpticsError, ValueError):
    """A run configuration failed validation."""


class NumericalError(BerryOpticsError, ArithmeticError):
    """A numerical procedure failed to meet its contract."""


class QuadratureError(NumericalError):
    """Adaptive quadrature ran out of subdivisions.

    ``value`` and ``error`` hold the partial result at the time of failure.
    """

    def __init__(self, message: str, value: float, error: float, n_intervals: int):
        super().__init__(message)
        self.value = value
        self.error = error
        self.n_intervals = n_intervals


class StepSizeError(NumericalError):
    """ODE step size underflowed; ``diagnostics`` describes the state."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


class PhaseUnwrapError(NumericalError):
    """Phase cannot be followed continuously (amplitude too small or samples too sparse)."""


class AliasingError(NumericalError):
    """A sampled wave function is not resolved by its grid."""
