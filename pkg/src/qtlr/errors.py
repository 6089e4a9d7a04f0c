"""Exception types raised across the package."""


class QTLRError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(QTLRError, ValueError):
    pass


class ModeOutOfRange(QTLRError, ValueError):
    pass


class DomainError(QTLRError, ValueError):
    pass


class NotPowerOfTwo(QTLRError, ValueError):
    pass


class InvalidProblem(QTLRError, ValueError):
    pass


class TooSmall(QTLRError, ValueError):
    pass


class MixedDimensions(QTLRError, ValueError):
    pass


class UnreadableFile(QTLRError, OSError):
    pass


class NumericalFailure(QTLRError, ArithmeticError):
    """An inner SVD failed to converge.

    ``context`` carries whatever locates the failure (slice index,
    iteration, mode) so callers can report it.
    """

    def __init__(self, message, **context):
        self.context = context
        if context:
            extra = ", ".join(f"{k}={v}" for k, v in context.items())
            message = f"{message} ({extra})"
        super().__init__(message)
