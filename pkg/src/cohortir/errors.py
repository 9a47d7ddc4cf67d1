"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage/config problems -> 1,
parse/data problems -> 2, scorer transport or protocol problems -> 3.
"""

from __future__ import annotations


class CohortIrError(Exception):
    """Base class for all package errors."""


class ConfigError(CohortIrError):
    """Bad flag value, unknown config key, or a field outside its domain."""


class ParseError(CohortIrError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(CohortIrError):
    """Semantically invalid data: unknown ids, duplicates, broken invariants."""


class UnsearchableQueryError(DataError):
    """Query text yields no terms after stopword removal."""


class ScorerError(CohortIrError):
    """Base for failures while talking to a relevance scorer."""


class ScorerTransportError(ScorerError):
    """Scorer unreachable or repeatedly failing at the transport level."""


class ScorerProtocolError(ScorerError):
    """Scorer answered, but the response violates the wire contract."""
