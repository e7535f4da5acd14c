"""Exception types shared across the package."""


class BarricadeError(Exception):
    """Base class for all errors raised by barricade."""


class DimensionError(BarricadeError, ValueError):
    """Operands live in spaces of different dimension."""


class EmptySetError(BarricadeError, ValueError):
    """A set representation describes the empty set."""


class ConvergenceError(BarricadeError):
    """An iterative method ran out of budget.

    The best iterate and its residual are kept so callers can still report
    partial progress.
    """

    def __init__(self, message, best=None, residual=None, partial=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.partial = partial


class InconclusiveError(BarricadeError):
    """A numeric probe could not decide within its budget."""

    def __init__(self, message, lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound
