"""Exception hierarchy; each class maps to one CLI exit code."""


class FredlagError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidInputError(FredlagError, ValueError):
    """Input violates a precondition (shape, symmetry, frame invariants)."""

    exit_code = 1


class AdmissibilityError(FredlagError):
    """A sampled object is too coarse or too degenerate for the requested computation.

    ``interval`` carries the offending sample interval ``(i, i + 1)`` when known,
    so the caller can refine there.
    """

    exit_code = 2

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class TransversalityError(AdmissibilityError):
    """Two Lagrangians that must be transverse are not (within the margin)."""


class NumericalError(FredlagError, ArithmeticError):
    """A numerical routine failed its own postconditions."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """An iteration did not converge within its step budget."""
