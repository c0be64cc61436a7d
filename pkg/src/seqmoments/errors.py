"""Exception hierarchy shared by the library and the command-line tool.

Each class maps to a distinct process exit code so shell pipelines can
distinguish bad inputs from coverage gaps and internal inconsistencies.
"""

from __future__ import annotations


class SeqMomentsError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InputError(SeqMomentsError):
    """Malformed or invalid input: files, flags, parameter ranges."""

    exit_code = 2


class CoverageError(SeqMomentsError):
    """A prediction set does not cover the domain corpus."""

    exit_code = 3

    def __init__(self, message: str, missing: list[str] | None = None):
        super().__init__(message)
        # rendered sequence strings, sorted; may be truncated in the message
        self.missing = missing or []


class ConsistencyError(SeqMomentsError):
    """Internal contract violation: mismatched supports, lengths, or tables."""

    exit_code = 4
