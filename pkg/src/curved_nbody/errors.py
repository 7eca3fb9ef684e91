"""Exception hierarchy shared by all modules."""


class CurvedNBodyError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CurvedNBodyError, ValueError):
    """A point lies outside the chart (on or beyond the Poincare disk boundary)."""


class CollisionError(DomainError):
    """Two bodies are closer than the collision threshold."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class AntipodalError(DomainError):
    """Two bodies are (numerically) antipodal on the sphere, where V diverges."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class FlatCurvatureError(DomainError):
    """An operation needing a curved surface was called with kappa == 0."""


class PreconditionError(CurvedNBodyError, ValueError):
    """Input violates a documented precondition (e.g. not a critical point)."""


class DegenerateSeedError(CurvedNBodyError):
    """The seed central configuration has a Hessian kernel of dimension != 1."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceError(CurvedNBodyError):
    """Newton iteration exceeded its iteration budget.

    Carries the last iterate and the residual history so callers can inspect
    how close the solve got.
    """

    def __init__(self, message, last=None, history=None):
        super().__init__(message)
        self.last = last
        self.history = list(history or [])

    @property
    def best_residual(self):
        return min(self.history) if self.history else float("inf")


class SingularJacobianError(ConvergenceError):
    """The bordered Jacobian is numerically singular (fold or bifurcation suspect)."""


class EigenSolverError(CurvedNBodyError):
    """The symmetric eigensolver failed to converge."""


class IntegrationError(CurvedNBodyError):
    """The ODE integrator could not reach the requested end time."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
