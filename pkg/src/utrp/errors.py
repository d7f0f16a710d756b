"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class UtrpError(Exception):
    """Base class for all errors raised by utrp."""


class ValidationError(UtrpError, ValueError):
    """An input object violates one of its invariants."""


class ParseError(UtrpError, ValueError):
    """A document could not be decoded.

    ``line`` and ``field`` locate the problem when known.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class CapExceeded(UtrpError):
    """Enumeration would produce more items than the configured cap."""

    def __init__(self, what: str, cap: int):
        self.what = what
        self.cap = cap
        super().__init__(f"number of {what} exceeds cap of {cap}; raise the cap to continue")


class NotNormalized(UtrpError):
    """A strongly uncertain attribute reached an operation that needs probabilities."""


class TieError(UtrpError):
    """Two included events share an identical point timestamp (strict mode only)."""


class NotEnabled(UtrpError):
    """A transition was fired in a marking that does not enable it."""


class Unalignable(UtrpError):
    """No alignment exists: the final marking cannot be reached."""


class Deadlock(UtrpError):
    """A simulation run reached a non-final marking with nothing enabled."""
