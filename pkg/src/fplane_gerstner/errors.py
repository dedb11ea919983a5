"""Exception hierarchy."""


class GerstnerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GerstnerError, ValueError):
    """An argument lies outside the region where the solution is defined."""


class InfeasibleError(GerstnerError):
    """The dispersion relation has no real roots."""

    def __init__(self, message, discriminant=None):
        super().__init__(message)
        self.discriminant = discriminant


class NoSurfaceError(GerstnerError):
    """No free surface label r(s) <= r0 exists at the requested latitude.

    ``value`` carries the sign-check quantity h(r0, s) - h(r0, 0), which is
    positive when the surface would have to sit above r0.
    """

    def __init__(self, message, value=None, s=None):
        super().__init__(message)
        self.value = value
        self.s = s


class OutOfFluidError(GerstnerError):
    """A physical point lies above the free surface."""


class ConvergenceError(GerstnerError, ArithmeticError):
    """An iterative solver failed to converge; ``residual`` is the last one."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class UnsupportedConfigError(GerstnerError):
    """The requested computation is not defined for this configuration."""
