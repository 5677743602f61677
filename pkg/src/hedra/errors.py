"""Exception types raised by the hedra toolkit."""


class HedraError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(HedraError, ValueError):
    """A parameter is out of its admissible range."""


class DegenerateGeometryError(HedraError, ValueError):
    """Two endpoints of a member coincide, or a system has no unknowns."""


class EmptySystemError(HedraError, ValueError):
    """The equilibrium system has no rows or no columns."""


class NotStaticallyFeasibleError(HedraError):
    """The pose cannot be held with every cable at or above the minimum density."""


class InfeasibleLoadError(NotStaticallyFeasibleError):
    """The load vector lies outside the range of the equilibrium matrix.

    Attributes
    ----------
    residual : float
        Least-squares residual ``||A A^+ p - p||``.
    """

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class SlackImpossibleError(HedraError, ValueError):
    """A force density at or above the cable stiffness gives a non-positive rest length."""


class DivergenceError(HedraError):
    """Dynamic relaxation did not converge.

    Attributes
    ----------
    positions : ndarray
        Last nodal positions reached.
    diagnostics : dict
        Iteration count, last peak force and kinetic energy.
    """

    def __init__(self, message, positions, diagnostics):
        super().__init__(message)
        self.positions = positions
        self.diagnostics = diagnostics
