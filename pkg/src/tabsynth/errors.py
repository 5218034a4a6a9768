"""Exception hierarchy shared by every tabsynth module."""

from __future__ import annotations


class TabsynthError(Exception):
    """Base class for all errors raised by tabsynth."""


class DomainError(TabsynthError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class FactorizationError(TabsynthError, ArithmeticError):
    """Cholesky factorization hit a non-positive pivot."""

    def __init__(self, pivot: int, value: float, message: str | None = None):
        self.pivot = pivot
        self.value = value
        super().__init__(
            message
            or f"matrix is not positive definite: pivot {pivot} is {value:.6g}"
        )


class ShapeError(TabsynthError, ValueError):
    pass


class SchemaError(TabsynthError, ValueError):
    pass


class ParseError(TabsynthError, ValueError):
    """Malformed CSV input. ``row`` is the 1-based data row, ``column`` the header name."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        super().__init__(message)


class ColumnLookupError(TabsynthError, KeyError):
    def __str__(self) -> str:
        # KeyError.__str__ would repr() the message
        return str(self.args[0]) if self.args else ""


class InsufficientDataError(TabsynthError, ValueError):
    pass


class DegenerateColumnError(TabsynthError, ValueError):
    def __init__(self, column: str, message: str | None = None):
        self.column = column
        super().__init__(message or f"column {column!r} is constant")


class EmptyInputError(TabsynthError, ValueError):
    pass


class ConfigError(TabsynthError):
    """Malformed run configuration; ``field`` is a dotted path when known."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
