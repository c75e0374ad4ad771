"""Exception hierarchy for the trace laboratory.

Every error raised deliberately by this package derives from
:class:`AffTraceError`, so callers can catch the package's failures
without swallowing genuine bugs. Subclasses also inherit from the
closest builtin category (``ValueError``, ``ArithmeticError``,
``RuntimeError``) so code written against the standard taxonomy keeps
working.
"""


class AffTraceError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(AffTraceError, ValueError):
    """A parameter bundle violates an admissibility bound.

    The message names the violated bound, e.g. ``alpha must lie in
    [0.5, 1)``.
    """


class DomainError(AffTraceError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class RangeError(AffTraceError, ValueError):
    """A tabulated profile was evaluated outside its recorded support.

    Profiles never extrapolate; evaluation beyond the tabulated range
    raises this error unless the profile documents a decay convention
    for its tail.
    """


class ConditioningError(AffTraceError, ArithmeticError):
    """A division was stopped by the spectral conditioning floor.

    Raised when a multiplier ratio would divide by a value smaller in
    magnitude than the configured floor, instead of silently amplifying
    noise.
    """


class DegenerateEnergyError(AffTraceError, ArithmeticError):
    """A quotient denominator vanished or lost all significance."""


class ResolutionError(AffTraceError, ValueError):
    """A grid or quadrature cannot honestly resolve the request.

    Raised, for example, when a node-doubling self-consistency check
    fails to reach its target, rather than returning a value whose
    accuracy is unknown.
    """


class SearchFailure(AffTraceError, RuntimeError):
    """The optimizer could not produce a usable result."""


class UsageError(AffTraceError, ValueError):
    """Command line arguments or config entries are malformed."""
