"""Exception types raised by permcycles."""


class PermCyclesError(Exception):
    """Base class for all package errors."""


class RangeError(PermCyclesError, ValueError):
    """An argument lies outside the domain an operation supports."""


class ConfigError(PermCyclesError, ValueError):
    """A configuration parameter (precision, tolerance, grid spec) is invalid."""


class ResourceError(PermCyclesError, MemoryError):
    """The requested computation exceeds the configured workspace."""


class ConvergenceError(PermCyclesError, ArithmeticError):
    """An iterative solver failed to converge.

    The last iterate and its residual are kept so callers can inspect how
    far the solver got.
    """

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class RangeWarning(UserWarning):
    """An asymptotic formula is evaluated outside the range where it is proven."""
