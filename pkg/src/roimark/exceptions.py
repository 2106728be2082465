"""Exception hierarchy shared across the package."""


class RoimarkError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RoimarkError, ValueError):
    """Invalid argument, file content or state (bad shapes, ranges, keys)."""


class FormatError(ValidationError):
    """Malformed or unsupported file format."""
