"""Exception types raised across the package."""


class PackCoverError(Exception):
    """Base class for every error raised by packcover."""


class InvalidInstance(PackCoverError, ValueError):
    """An instance violates a construction precondition."""


class NonPositiveWeight(InvalidInstance):
    pass


class EmptyColumn(InvalidInstance):
    pass


class NegativeEntry(InvalidInstance):
    pass


class IndexOutOfBounds(InvalidInstance):
    pass


class DimensionMismatch(PackCoverError, ValueError):
    pass


class NegativeInput(PackCoverError, ValueError):
    pass


class NonPositiveInput(PackCoverError, ValueError):
    pass


class DomainViolation(PackCoverError, ArithmeticError):
    """Some ``1 + z_j / eta`` left the open positive half-line."""


class BadAccuracy(PackCoverError, ValueError):
    pass


class DegenerateLog(PackCoverError, ValueError):
    pass


class NumericalFailure(PackCoverError, ArithmeticError):
    """Non-finite values, or an analysis invariant broken in debug mode."""


class IterationCapExceeded(PackCoverError, RuntimeError):
    pass


class NoUpperBound(PackCoverError, ValueError):
    pass


class TooLarge(PackCoverError, ValueError):
    pass


class SingularOnly(PackCoverError, RuntimeError):
    pass


class ParseError(PackCoverError, ValueError):
    """Malformed instance file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
