"""Exception hierarchy.

Input problems derive from ``InputError`` (also a ``ValueError``); numerical
failures derive from ``NumericalError``. The CLI maps the two families to
exit codes 1 and 2.
"""


class InputError(ValueError):
    """Malformed or inconsistent input (shapes, parameters, files)."""


class NumericalError(ArithmeticError):
    """A computation could not produce a trustworthy result."""


class SingularMatrixError(NumericalError):
    """Pivot breakdown or a zero smallest singular value."""


class SolveFailure(NumericalError):
    """A single solve failed; ``column`` names the right-hand side when known."""

    def __init__(self, message, iteration=None, column=None):
        super().__init__(message)
        self.message = message
        self.iteration = iteration
        self.column = column

    def __str__(self):
        return self.message if self.column is None else f"column {self.column}: {self.message}"


class DivergenceError(SolveFailure):
    """A solver produced a non-finite iterate or objective."""


class BreakdownError(SolveFailure):
    """Non-positive curvature met inside conjugate gradients."""
