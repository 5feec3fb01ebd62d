"""Exception hierarchy shared across the package."""


class MbasElmError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(MbasElmError, ValueError):
    """Array shapes do not line up."""


class NumericalError(MbasElmError, ArithmeticError):
    """A linear-algebra kernel failed to converge."""


class FitnessError(MbasElmError, ValueError):
    """An objective returned NaN or -inf.

    ``position`` holds the point that produced the bad value.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DegenerateTargetError(MbasElmError, ValueError):
    """Targets have zero variance so R^2 is undefined."""


class ConfigError(MbasElmError, ValueError):
    pass


class DataError(MbasElmError, ValueError):
    pass


class ParseError(DataError):
    """Malformed dataset text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
