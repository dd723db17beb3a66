"""Exception types shared across the package."""


class OmegaError(Exception):
    """Base class for all errors raised by omegafn."""


class InputError(OmegaError, ValueError):
    """Malformed user input (potential strings, complex literals, expressions)."""


class ToleranceError(OmegaError):
    """A numerical routine could not reach the requested tolerance.

    The best available estimate and its error bound are kept on the exception
    so callers can still report them.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class PoleError(OmegaError):
    """Evaluation was requested at (or within ``pole_tol`` of) a pole ``s = -n``."""

    def __init__(self, message, n, residue=None):
        super().__init__(message)
        self.n = n
        self.residue = residue
