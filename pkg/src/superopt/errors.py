"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input -> 3, numerical
instability -> 4.  Everything derives from SuperoptError so library users
can catch one base class.
"""


class SuperoptError(Exception):
    pass


class InputError(SuperoptError):
    """Malformed or inconsistent user input (dimensions, schema, ...)."""


class BandwidthError(InputError):
    """Grid or truncation size too small for the stored bandwidth."""


class ZeroInputError(InputError):
    pass


class AlreadyAnalyticError(InputError):
    """Best-approximation request for a symbol with zero Hankel norm."""


class NotNonnegativeError(InputError):
    pass


class NotInnerError(InputError):
    pass


class NotUnitaryError(InputError):
    pass


class InstabilityError(SuperoptError):
    """Numerical instability: the honest outcome is a refusal, not a guess."""


class TruncationInstabilityError(InstabilityError):
    """A stabilization loop (kernel dimension, wandering rank) did not settle."""


class TruncationBudgetError(InstabilityError):
    """A band-limited truncation of a rational intermediate exceeded its
    residual budget."""


class DegenerateSymbolError(InstabilityError):
    """A grid division or winding computation hit a near-zero denominator."""


class AmbiguousMultiplicityError(InstabilityError):
    """Grouping of near-equal singular values changed under tolerance
    halving/doubling."""


class CompletionFailureError(InstabilityError):
    """Balanced completion could not certify the expected kernel structure."""


class InternalConsistencyError(InstabilityError):
    """A postcondition that the theory guarantees failed numerically."""
