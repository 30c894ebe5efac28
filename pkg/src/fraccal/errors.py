"""Exception types raised across :mod:`fraccal`."""

from __future__ import annotations


class FraccalError(Exception):
    """Base class for all library errors."""


class DomainError(FraccalError, ValueError):
    """Argument outside the domain of a function (e.g. a pole)."""


class AccuracyError(FraccalError, ArithmeticError):
    """A series or quadrature failed to reach the requested accuracy.

    The best estimate obtained so far is kept in :attr:`estimate`.
    """

    def __init__(self, message: str, estimate: float | None = None) -> None:
        super().__init__(message)
        self.estimate = estimate


class UnsupportedError(FraccalError, NotImplementedError):
    """Requested case exists mathematically but is not implemented."""


class SizeError(FraccalError, ValueError):
    """Invalid vector length or step index for a scheme."""


class SchemeMismatchError(FraccalError, ValueError):
    """Scheme is incompatible with the requested solver (shift mismatch)."""


class SingularStepError(FraccalError, ArithmeticError):
    """The linear system of a time step is singular."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step
