"""Exception hierarchy shared by all sturmkit modules."""

from __future__ import annotations


class SturmkitError(Exception):
    """Base class for every error raised by the package."""


class PotentialError(SturmkitError, ValueError):
    """Invalid potential specification (gap, overlap, empty piece, bad keys)."""


class ExpressionError(PotentialError):
    """Syntax error or unknown identifier inside an expression piece."""

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
            if text is not None:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class DomainError(SturmkitError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class PreconditionError(SturmkitError, ValueError):
    """A stated hypothesis of a check does not hold; ``reason`` names which."""

    def __init__(self, reason: str, message: str):
        self.reason = reason
        super().__init__(f"{reason}: {message}")


class NumericError(SturmkitError, RuntimeError):
    """Numerical failure: step-size underflow, search cap exceeded, etc."""


class InternalConsistencyError(NumericError):
    """Two computations that must agree did not."""
