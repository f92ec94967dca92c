"""Exception hierarchy shared by the exact and numeric layers."""


class NotDivisible(ArithmeticError):
    """Raised when an exact polynomial division leaves a nonzero remainder."""


class IntegralityViolation(NotDivisible):
    """A division that must be exact in the series class failed.

    This never happens on valid inputs; seeing it means a bug in the
    denominator bookkeeping.
    """


class StabilizationFailure(RuntimeError):
    """A coefficient changed after the iteration at which it must be final."""


class NonPositiveLeading(ValueError):
    """Root bounds require a polynomial with positive leading coefficient."""


class PrecisionExhausted(ArithmeticError):
    """Cancellation in a numeric sum consumed too many working digits."""


class NoConvergence(RuntimeError):
    """An iteration did not reach the requested tolerance."""
