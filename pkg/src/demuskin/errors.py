"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class InternalError(RuntimeError):
    """Raised when an internal consistency check fails (a bug, not bad input)."""
