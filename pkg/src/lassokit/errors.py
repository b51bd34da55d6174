"""Exception hierarchy shared by all modules."""


class LassoKitError(Exception):
    """Base class for every error raised by lassokit."""


class InputError(LassoKitError, ValueError):
    """Malformed, non-finite or dimensionally inconsistent input."""


class UnsupportedError(LassoKitError):
    """The request is well-formed but outside what the routine handles
    (for example KKT checks at lambda = 0)."""


class CapabilityError(LassoKitError):
    """An exhaustive routine was asked to run beyond its configured size cap."""


class RangeError(LassoKitError, ValueError):
    """A query falls outside the range a path object covers."""


class ConvergenceError(LassoKitError):
    """An iterative solver hit its iteration cap before certifying optimality."""

    def __init__(self, message, gap=None, iterations=None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations


class DivergenceError(ConvergenceError):
    """Iterates left the numerically safe region (e.g. Poisson overflow guard)."""


class CyclingError(LassoKitError):
    """The path algorithm revisited a state or exceeded its iteration budget."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class InconsistencyError(LassoKitError):
    """A provably impossible numerical outcome, e.g. an empty solution polytope."""
