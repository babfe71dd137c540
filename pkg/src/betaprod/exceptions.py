"""Exception hierarchy for betaprod."""


class BetaProdError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BetaProdError, ValueError):
    """Argument outside the domain of a function."""


class PoleError(DomainError):
    """Argument sits on (or within ``TOL_INT`` of) a pole."""


class ValidationError(BetaProdError, ValueError):
    """Invalid product specification or run configuration."""


class GenericityError(BetaProdError, ValueError):
    """Operation requires ``u_i - u_j`` to be non-integer for all i != j."""


class ConvergenceError(BetaProdError, ArithmeticError):
    """A series or quadrature did not reach its tolerance.

    ``estimate`` carries the best value obtained, when one exists.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
