"""Slot values, identifier/token rules, and RFC 3339 timestamp helpers.

A SlotValue is the single value model used everywhere: statement slots,
context assertions, condition literals, and step inputs/outputs. Numbers
always carry a unit token ("1" for dimensionless) and use Decimal magnitudes
so equality comparisons are exact, never float-approximate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal, InvalidOperation
from functools import lru_cache

from .errors import InvalidUnitId, ParseFailure

UNIT_ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9_.:-]*\Z")
# Attribute and subject tokens: like unit ids but dot-free, so that a path
# `subject.attribute` always splits unambiguously at its last dot.
ATTR_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z0-9_:-]*\Z")
UNIT_TOKEN_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

DIMENSIONLESS = "1"


def check_unit_id(value: str) -> str:
    if not UNIT_ID_RE.match(value):
        raise InvalidUnitId(f"invalid unit id {value!r}")
    return value


def is_attr_token(value: str) -> bool:
    return bool(ATTR_TOKEN_RE.match(value))


def split_path(path: str) -> tuple[str, str]:
    """Split `subject.attribute` at the last dot (attributes are dot-free)."""
    subject, dot, attribute = path.rpartition(".")
    if not dot or not subject or not is_attr_token(attribute):
        raise ParseFailure(f"invalid path {path!r}: expected subject.attribute")
    return subject, attribute


@lru_cache(maxsize=4096)
def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp (Python 3.10 fromisoformat rejects 'Z')."""
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise ParseFailure(f"invalid RFC 3339 timestamp {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def now_rfc3339() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


@dataclass(frozen=True)
class SlotValue:
    """Tagged union: exactly one of the five payloads is set.

    kind: one of "number", "text", "boolean", "ref", "timestamp".
    """

    kind: str
    magnitude: Decimal | None = None
    unit: str | None = None
    text: str | None = None
    boolean: bool | None = None
    ref: str | None = None
    timestamp: str | None = None

    def __post_init__(self):
        if self.kind == "number":
            if self.magnitude is None or not self.unit:
                raise ParseFailure("number slot value needs magnitude and unit")
            if not UNIT_TOKEN_RE.match(self.unit) and self.unit != DIMENSIONLESS:
                raise ParseFailure(f"invalid unit token {self.unit!r}")
        elif self.kind == "text":
            if self.text is None:
                raise ParseFailure("text slot value needs text")
        elif self.kind == "boolean":
            if self.boolean is None:
                raise ParseFailure("boolean slot value needs boolean")
        elif self.kind == "ref":
            if self.ref is None:
                raise ParseFailure("ref slot value needs ref")
            check_unit_id(self.ref)
        elif self.kind == "timestamp":
            if self.timestamp is None:
                raise ParseFailure("timestamp slot value needs timestamp")
            parse_rfc3339(self.timestamp)
        else:
            raise ParseFailure(f"unknown slot value kind {self.kind!r}")


def number(magnitude: Decimal | int | str, unit: str = DIMENSIONLESS) -> SlotValue:
    try:
        mag = magnitude if isinstance(magnitude, Decimal) else Decimal(str(magnitude))
    except InvalidOperation as exc:
        raise ParseFailure(f"invalid decimal magnitude {magnitude!r}") from exc
    return SlotValue(kind="number", magnitude=mag, unit=unit)


def text(value: str) -> SlotValue:
    return SlotValue(kind="text", text=value)


def boolean(value: bool) -> SlotValue:
    return SlotValue(kind="boolean", boolean=value)


def ref(unit_id: str) -> SlotValue:
    return SlotValue(kind="ref", ref=unit_id)


def timestamp(value: str) -> SlotValue:
    return SlotValue(kind="timestamp", timestamp=value)
