"""Exception types shared across the toolkit."""

from __future__ import annotations


class MalformedInput(ValueError):
    """Input violates an operation's precondition or a file format."""


class ParseError(MalformedInput):
    """Syntax error with a source position and the set of tokens that would have been accepted."""

    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.reason = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        exp = ""
        if self.expected:
            exp = " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(f"{line}:{column}: {message}{exp}")


class KernelError(Exception):
    """A derivation node does not match its rule schema."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")
