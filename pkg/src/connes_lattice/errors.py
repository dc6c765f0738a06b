"""Exception hierarchy shared by all modules."""


class ConnesError(Exception):
    """Base class for errors raised by this package."""


class NotSquareError(ConnesError, ValueError):
    pass


class NotHermitianError(ConnesError, ValueError):
    pass


class NonFiniteError(ConnesError, ValueError):
    pass


class DimensionMismatchError(ConnesError, ValueError):
    pass


class TooSmallError(ConnesError, ValueError):
    pass


class TooLargeError(ConnesError, ValueError):
    pass


class IncompatibleKindError(ConnesError, ValueError):
    pass


class LengthMismatchError(ConnesError, ValueError):
    pass


class IndexOutOfRangeError(ConnesError, IndexError):
    pass


class NoArrowsError(ConnesError, ValueError):
    pass


class InvariantViolationError(ConnesError, ValueError):
    pass


class GraphParseError(ConnesError, ValueError):
    """Malformed graph file. ``lineno`` is 1-based, or None if unknown."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ConvergenceWarning(UserWarning):
    """Emitted when the numeric distance solver stops before closing its gap."""
