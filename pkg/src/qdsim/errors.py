"""Exception taxonomy.

Everything raised on purpose derives from QdsimError so callers can catch
one type at the boundary; the normalization failure additionally derives
from ArithmeticError because it is a genuine numeric breakdown (division
by a vanishing trace), not a usage mistake.
"""

from __future__ import annotations


class QdsimError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(QdsimError, ValueError):
    """Operator or vector has the wrong shape for the requested operation."""


class ValidityError(QdsimError, ValueError):
    """Object fails a mathematical validity requirement (hermiticity,
    trace, positivity, unit norm, finiteness)."""


class DomainError(QdsimError, ValueError):
    """Parameter outside the range where the formula it feeds is defined."""


class PreconditionError(QdsimError, ValueError):
    """Inputs are individually fine but jointly violate a documented
    assumption of the routine."""


class SingularNormalizationError(QdsimError, ArithmeticError):
    """Trace normalization hit a (numerically) vanishing denominator."""


class UnsupportedModeError(QdsimError, ValueError):
    """Requested a representation or code path the object cannot provide."""


class IntegrationDivergedError(QdsimError, RuntimeError):
    """A propagated state left its validity class mid-run."""

    def __init__(self, message: str, time: float) -> None:
        super().__init__(f"{message} (at t={time!r})")
        self.time = time


class NoCrossingError(QdsimError, RuntimeError):
    """Root bracketing failed: the tracked quantity never changes sign."""
