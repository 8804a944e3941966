"""Exception types shared across the package."""


class VarpulseError(Exception):
    """Base class for all varpulse errors."""


class MissingDataError(VarpulseError):
    """A diary CSV contains an empty or absent cell; series must be complete."""


class ParseError(VarpulseError):
    """A diary CSV cell could not be parsed as a number."""


class ConfigError(VarpulseError):
    """Configuration references an unknown variable or an invalid value."""


class FitError(VarpulseError):
    """Least-squares estimation failed (singular or degenerate input)."""


class ModelFormatError(VarpulseError):
    """A model file does not match the expected schema."""


class DomainError(VarpulseError):
    """An operation was called outside its valid domain."""


class DecompositionError(VarpulseError):
    """The residual covariance admits no Cholesky factorization."""


class BootstrapUnavailableError(VarpulseError):
    """Neither residuals nor raw data are available for resampling."""
