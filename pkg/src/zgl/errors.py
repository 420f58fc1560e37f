"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, ``DataError``
subclasses -> 3.
"""


class ZGLError(Exception):
    pass


class DomainError(ZGLError, ValueError):
    """Argument outside the documented domain of an operation."""


class PoleError(DomainError):
    pass


class ConvergenceError(ZGLError, ArithmeticError):
    pass


class DegenerateFitError(ZGLError, ValueError):
    pass


class PrimitivityError(DomainError):
    pass


class ConfigError(ZGLError, ValueError):
    pass


class DataError(ZGLError):
    """Problems with tables: coverage, capacity, parsing, validation."""


class CoverageError(DataError):
    pass


class CapacityError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MonotonicityError(ParseError):
    pass


class EmptyTableError(DataError):
    pass


class MissedZeroError(DataError):
    pass
