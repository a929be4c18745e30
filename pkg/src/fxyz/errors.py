"""Exception hierarchy shared by all modules."""


class FxyzError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(FxyzError, ValueError):
    """Invalid model or numerical parameters."""


class SingularParameterError(ParameterError):
    """A theta factor in a denominator vanishes for the chosen parameters."""


class ConfigurationError(ParameterError):
    """A string configuration cannot be built for the requested model."""


class SizeError(ParameterError):
    """A cost guard (dimension, number of factors) would be exceeded."""


class DimensionError(FxyzError, ValueError):
    """Operator and state factor dimensions do not match."""


class PrecisionError(FxyzError):
    """Requested series tolerance is not reachable under the truncation cap."""


class PoleError(FxyzError, ValueError):
    """Spectral parameter too close to a pole of a normalized R-matrix."""


class NumericError(FxyzError, ArithmeticError):
    """Non-convergence or ill-conditioning in a linear-algebra kernel."""


class ConsistencyError(FxyzError):
    """Two independent evaluations of the same quantity disagree."""


class ConvergenceError(NumericError):
    """Iterative solver did not reach its tolerance."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class CollisionError(ConvergenceError):
    """Two Bethe roots collided (or started equal)."""


class SingularConfigurationError(FxyzError, ValueError):
    """A Bethe configuration hits a zero of theta_11."""
