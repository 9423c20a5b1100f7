"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input data. Carries the offending 1-based data row when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"{message} at row {row}"
        super().__init__(message)


class NumericalError(RuntimeError):
    """Base class for numerical faults (infeasible states, non-convergence)."""


class InfeasibleStateError(NumericalError):
    """The constrained-uniform state violates the interval precedence order.

    This signals corrupted internal state, not bad user input: the sampler
    keeps feasibility invariant, so seeing this means a bug or NaN leak.
    """


class ConvergenceError(NumericalError):
    """An iterative solver exhausted its iteration budget."""
