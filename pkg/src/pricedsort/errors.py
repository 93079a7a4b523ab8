"""Exception types raised across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain of the operation."""


class SizeError(ParameterError):
    """Exact enumeration was requested for an instance that is too large."""


class ForbiddenComparisonError(RuntimeError):
    """An infinite-cost pair was probed."""


class InvalidCertificateError(ValueError):
    """A certificate uses an edge that cannot have been probed."""


class ConfigError(ValueError):
    """An experiment configuration is not runnable."""
