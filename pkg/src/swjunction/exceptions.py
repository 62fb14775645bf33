"""Exception hierarchy shared by the kernel, junction solver and simulator."""


class SWJunctionError(Exception):
    """Base class for all package errors."""


class DryStateError(SWJunctionError, ValueError):
    """A water height fell to (or below) the wet-depth floor."""


class NoConvergenceError(SWJunctionError, RuntimeError):
    """An iterative solver ran out of iterations or step length."""


class SupercriticalError(SWJunctionError, ValueError):
    """A junction state violates the subcritical (fluvial) assumption."""


class DegenerateTriangleError(SWJunctionError, ValueError):
    """The junction wall intersections are collinear or inverted."""


class InvalidShapeError(SWJunctionError, ValueError):
    """Angles or half-widths break the junction shape invariants."""


class ConfigError(SWJunctionError, ValueError):
    """A scenario document failed to parse or validate.

    ``errors`` holds every problem found, each as ``"path: message"``.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SimulationError(SWJunctionError, RuntimeError):
    """A time step failed; carries the context needed for a post-mortem."""

    def __init__(self, message, *, step=None, time=None, junction=None, trace=None):
        super().__init__(message)
        self.step = step
        self.time = time
        self.junction = junction
        self.trace = trace
