"""Exception taxonomy shared across the store, engine, orchestrator, and gateway.

Every error carries a short machine code (used by the HTTP envelope) next to
the human message, so the gateway never has to pattern-match on types twice.
"""

from __future__ import annotations


class AkuError(Exception):
    """Base class; `code` is the wire error code for the gateway envelope."""

    code = "invalid"

    def __init__(self, message: str, detail: object = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


class NotFound(AkuError):
    code = "not_found"


class DuplicateIdConflict(AkuError):
    code = "conflict"


class DanglingReference(AkuError):
    code = "invalid"


class PartCycle(AkuError):
    code = "invalid"


class WrongFrame(AkuError):
    code = "invalid"


class InvalidSchema(AkuError):
    code = "invalid"


class InvalidActionUnit(AkuError):
    code = "invalid"


class InvalidUnitId(AkuError):
    code = "invalid"


class IoFailure(AkuError):
    code = "invalid"


class ParseFailure(AkuError):
    code = "invalid"


class DslSyntaxError(AkuError):
    """Condition-DSL syntax error; `position` is a 0-based character offset."""

    code = "invalid"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnitSyntaxError(DslSyntaxError):
    """Bad or inconsistent measurement-unit token inside a condition literal."""


class ExecutorFailure(AkuError):
    code = "invalid"


class BindingTypeMismatch(AkuError):
    code = "invalid"


class NoSuchTask(AkuError):
    code = "not_found"


class MissingOutput(AkuError):
    code = "invalid"


class TypeMismatch(AkuError):
    code = "invalid"


class BlockedExecution(AkuError):
    code = "blocked"


class ReadOnlyMode(AkuError):
    code = "invalid"
