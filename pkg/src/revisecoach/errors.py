"""Shared exception types, split by how the CLI reports them.

DomainError maps to exit code 1 (the request was understood but violates
a rule); InputFormatError maps to exit code 2 (the input itself could not
be parsed) and carries a line number when one is known.
"""

from __future__ import annotations


class DomainError(Exception):
    """A rule of the platform was violated (bad label, limit, mismatch)."""


class InputFormatError(Exception):
    """An input file or payload could not be parsed."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)
