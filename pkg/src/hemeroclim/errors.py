"""Exception types shared across the package.

Every error that crosses a module boundary (or the HTTP surface) maps to a
stable code via `code`; the service layer relies on these to build error
envelopes without string-matching messages.
"""

from __future__ import annotations


class HemeroclimError(Exception):
    """Base class for domain errors."""

    code = "error"

    def __init__(self, message: str, details: object = None):
        super().__init__(message)
        self.details = details


class ValidationError(HemeroclimError):
    code = "validation_failed"


class NotFoundError(HemeroclimError):
    code = "not_found"


class ConflictError(HemeroclimError):
    code = "conflict"


class VersionConflictError(HemeroclimError):
    code = "version_conflict"


class TaskClosedError(HemeroclimError):
    code = "task_closed"


class UnknownSpanError(HemeroclimError):
    code = "unknown_span"


class UnsupportedCountryError(HemeroclimError):
    code = "unsupported_country"


class CycleError(HemeroclimError):
    code = "cycle"


class ParseError(HemeroclimError):
    """Query text could not be parsed; `position` is a 0-based offset."""

    code = "parse_error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class QueryError(HemeroclimError):
    code = "constraints_need_event_history"
