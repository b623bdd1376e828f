"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid hidden-variable configuration or malformed graph input."""


class PreconditionError(ValueError):
    """An operation was called on a graph it does not support (e.g. disconnected)."""


class CoverageError(ValueError):
    """A closed-form propagator was asked for an index pair it does not cover."""


class SpectralConsistencyError(RuntimeError):
    """A constructed eigenpair failed its residual or orthogonality check."""


class OracleSizeError(ValueError):
    """Dense reference routines refuse matrices above their size bound."""
