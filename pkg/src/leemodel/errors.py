"""Exception hierarchy.

Two families: `ParameterError` for inputs that violate a precondition
(these are also ``ValueError``), and `NumericalError` for failures of the
numerics on otherwise valid input.  The CLI maps them to exit codes 2 and 3.
"""


class LeeModelError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(LeeModelError, ValueError):
    pass


class NumericalError(LeeModelError, ArithmeticError):
    pass


class NonPositiveMass(ParameterError):
    pass


class NegativeCoupling(ParameterError):
    pass


class NonPositiveCutoff(ParameterError):
    pass


class InvalidBoundState(ParameterError):
    pass


class OutOfRange(ParameterError):
    pass


class NonPositiveU0(ParameterError):
    pass


class OnShellSingularity(ParameterError):
    pass


class DivergentIntegral(ParameterError):
    """The bare self-energy was requested with the local (unregulated) form factor."""


class DeltaLimitExcluded(ParameterError):
    """The quantity is infinite at g0 = infinity; use the bracket form instead."""


class QuadratureFailure(NumericalError):
    pass


class NoRoot(NumericalError):
    pass


class DegenerateGrid(NumericalError):
    pass
