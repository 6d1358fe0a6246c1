"""Exception types raised by the library."""

from __future__ import annotations


class StructMatError(Exception):
    """Base class for all library errors."""


class ZeroInBox(StructMatError, ZeroDivisionError):
    """A box handed to the reciprocal contains zero."""


class ZeroLeadingCoefficient(StructMatError, ValueError):
    pass


class NonPositiveDiscriminant(StructMatError, ValueError):
    pass


class UnknownFormula(StructMatError, KeyError):
    pass


class LeadingCoefficientTooSmall(StructMatError, ValueError):
    pass


class NonUnitDiagonal(StructMatError, ValueError):
    pass


class DuplicateNodes(StructMatError, ValueError):
    pass


class CoincidentNodes(StructMatError, ValueError):
    pass


class InsufficientInputAccuracy(StructMatError):
    """Declared input accuracy is below what the precision plan requires."""

    def __init__(self, name: str, required: int, declared: float):
        self.name = name
        self.required = required
        self.declared = declared
        super().__init__(
            f"input {name!r} declares accuracy 2^-{declared} but the plan "
            f"requires 2^-{required}"
        )


class BoundViolation(StructMatError, AssertionError):
    """A runtime norm-bound assertion failed in debug mode."""
