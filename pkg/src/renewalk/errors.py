"""Exception types shared across the package."""


class HorizonMismatchError(ValueError):
    """Two coefficient series passed to a binary operation differ in length."""


class SingularSeriesError(ZeroDivisionError):
    """A power series with zero constant term cannot be inverted."""


class ParameterError(ValueError):
    """A distribution or operation parameter is outside its domain."""


class BoxLeakageError(RuntimeError):
    """A propagator box is too small: probability mass escaped it."""


class QuadratureError(RuntimeError):
    """A numeric quadrature did not converge under refinement."""


class InconclusiveRunError(RuntimeError):
    """A Monte Carlo run hit its path-length cap too often to be trusted."""
