"""Exception hierarchy shared by every module of the toolkit."""


class SecularError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SecularError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularChartError(SecularError):
    """The point is on (or too close to) a coordinate singularity of a chart."""


class CollisionError(SecularError):
    """Two bodies collide, or an average crosses an orbit intersection."""


class ConvergenceError(SecularError):
    """A truncated series cannot reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class LevelSetError(SecularError):
    """A level set of the first integral leaves the chart or is not a graph."""


class NoRootError(SecularError):
    """A bracketed root search found no sign change."""


class PrecisionError(SecularError):
    """Finite differences of the requested order are numerically unstable."""


class RegimeError(SecularError):
    """An asymptotic expansion is used outside the regime where it holds."""

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class CollisionApproachError(CollisionError):
    """Integration stopped because the trajectory approached a collision."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class VerificationError(SecularError):
    """An internal consistency assertion failed."""
