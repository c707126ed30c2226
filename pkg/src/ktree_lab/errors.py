"""Exception types shared across the package."""


class KTreeLabError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameters(KTreeLabError, ValueError):
    """A parameter violates an operation precondition (bad k, n, b, trials...)."""


class ResourceExhausted(KTreeLabError):
    """Requested generation would exceed the configured memory budget."""


class MissingHistory(KTreeLabError):
    """Graph lacks the attachment history required by the operation."""


class GraphTooLarge(KTreeLabError):
    """Graph exceeds the size limit of a brute-force oracle."""


class InsufficientTail(KTreeLabError):
    """Too few distinct degrees above d_min for a tail-exponent fit."""


class DMaxTooSmall(KTreeLabError):
    """Truncated probability mass beyond d_max exceeds the tolerance."""


class KMismatch(KTreeLabError, ValueError):
    """Histogram and theoretical distribution were built for different k."""


class ParseError(KTreeLabError):
    """A text input file is malformed; carries the offending line number."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class InternalInvariantViolation(KTreeLabError):
    """A structural check that must hold by construction failed (generator bug)."""
