"""Exception hierarchy shared by every cubeslice module."""

from __future__ import annotations


class CubesliceError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(CubesliceError):
    """An enumeration would exceed a hard size cap."""


class NoIntersectionError(CubesliceError):
    """An affine map sends no cube point into the cube."""


class ConstraintViolation(CubesliceError, ValueError):
    """Construction parameters break one of the variant's inequalities."""


class InvalidPattern(CubesliceError, ValueError):
    pass


class PositivityError(CubesliceError, ValueError):
    """The positivity hypothesis of the plus-one combinator fails.

    ``witness`` is a nonzero cube point (bitmask) whose image has no
    strictly positive coordinate.
    """

    def __init__(self, message: str, witness: int):
        super().__init__(message)
        self.witness = witness


class ParseError(CubesliceError, ValueError):
    """Malformed text input; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<input>"):
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


class StoreError(CubesliceError):
    """The witness store is corrupt or holds an entry that fails re-verification."""
