"""Exception types raised by the solvers."""


class FreeTimeError(Exception):
    """Base class for numerical failures in this package."""


class DimensionMismatch(ValueError):
    pass


class CollisionError(FreeTimeError, ValueError):
    """Raised where an operation is undefined at a collision configuration."""


class NonConvergence(FreeTimeError):
    """The iteration budget ran out before the gradient tolerance was met.

    The best report found so far is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CollisionTrapped(FreeTimeError):
    """Every restart ended with a node pair closer than the collision guard."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateEndpoints(FreeTimeError, ValueError):
    """Free time minimization between identical configurations."""


class UnsupportedDimension(FreeTimeError, ValueError):
    """Minimization was requested in a setting where collisions cannot be excluded."""
