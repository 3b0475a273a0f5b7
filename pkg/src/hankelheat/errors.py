"""Exception types shared across the package."""


class HankelHeatError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HankelHeatError):
    """An input is outside the admissible parameter range."""


class NonConvergent(HankelHeatError):
    """A quadrature or series did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ResampleError(HankelHeatError):
    """Resampling would push non-negligible mass outside the grid."""


class IllConditioned(HankelHeatError):
    """A least-squares system is too ill-conditioned to trust."""


class Instability(HankelHeatError):
    """A time-stepping scheme blew up."""
