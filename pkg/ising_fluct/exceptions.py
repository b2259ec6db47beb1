"""
Errors raised by ising_fluct.

Every class also derives from a builtin, so code that only knows about
ValueError / RuntimeError keeps working.
"""


class IsingFluctError(Exception):
    pass


class DomainError(IsingFluctError, ValueError):
    pass


class CriticalPointError(DomainError):
    """Spectrum-dependent quantity requested exactly at lambda = 1."""

    def __init__(self, msg=None):
        msg = msg or (
            "lambda = 1 is the critical point: the level spacing vanishes. "
            "Use asymptote_S / asymptote_D / asymptote_second_moment instead."
        )
        super().__init__(msg)


class NumericalRangeError(DomainError):
    pass


class NormalizationError(DomainError):
    pass


class NonConvergenceError(IsingFluctError, RuntimeError):
    pass


class BracketError(IsingFluctError, RuntimeError):
    pass


class NegativeRadicandError(IsingFluctError, ArithmeticError):
    pass
