"""Exception types shared across the package."""


class RobinSpectraError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(RobinSpectraError):
    """Malformed or inconsistent experiment configuration."""


class NotIntegrableError(RobinSpectraError):
    """Raised when an integral over infinite support is requested."""


class NotAttractiveOnAverageError(RobinSpectraError):
    """The potential does not integrate to a positive value."""


class EssentialBottomNotZeroError(RobinSpectraError):
    """The essential spectrum does not start at zero, so the test-function
    certificate proves nothing."""


class InapplicableError(RobinSpectraError):
    """A requested bound or theorem-check does not apply to this potential."""


class ConvergenceError(RobinSpectraError):
    """Eigensolver failed to reach the requested residual tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class FactorizationError(RobinSpectraError):
    """Triangular factorization broke down; suggests perturbing the shift."""


class UnderflowWindowError(RobinSpectraError):
    """Decay-fit window reaches into numerically zero eigenfunction values."""


class NoAsymptoticRegimeError(RobinSpectraError):
    """Richardson differences are not monotone; no asymptotic regime."""
