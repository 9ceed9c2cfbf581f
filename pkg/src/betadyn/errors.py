"""Exception types shared across the package."""


class BetaDynError(Exception):
    """Base class for all numeric failures raised by this package."""


class DomainExcluded(BetaDynError, ValueError):
    """A point was given to a map whose boundary convention excludes it."""


class Unbounded(BetaDynError, ValueError):
    """A quantity is infinite for the requested parameter (e.g. beta = 2)."""


class Divergent(BetaDynError, ValueError):
    """A series was evaluated outside its disk of convergence."""


class NoConvergence(BetaDynError, RuntimeError):
    """An iteration did not settle within its budget."""


class TroubleSpot(BetaDynError):
    """The midpoint orbit landed on 1/2 before the requested length.

    ``step`` holds the index k with m_k = 1/2.
    """

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"midpoint orbit hits 1/2 at step {step}")


class BitOutOfRange(BetaDynError, ArithmeticError):
    """A computed digit was not 0 or 1: precision has been lost."""


class InsufficientPrefix(BetaDynError, ValueError):
    """An input bit string is too short for the requested exact output."""


class ReducibleMatrix(BetaDynError, ValueError):
    """A Hessenberg matrix has a vanishing sub-diagonal entry."""


class NoLimit(BetaDynError, RuntimeError):
    """A sequence of ratio estimates failed to stabilise.

    ``diagnostics`` carries the estimates that were examined.
    """

    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics
        super().__init__(message)
