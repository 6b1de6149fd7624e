"""Exception types shared across the package."""


class MarkovLensError(Exception):
    """Base class for all package-specific errors."""


class DataError(MarkovLensError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericError(MarkovLensError):
    """A computation has no well-defined numeric result (degenerate input)."""
