"""Statement schemata: reusable slot templates with admissible-value
constraints, conformance checking, and schema-based affordance lookup.

Conformance is the formal-applicability primitive: a statement either fits a
template or the report says exactly which roles fail and why. Extra slots a
schema does not mention are ignored (templates constrain what they name).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import ClassVar

from .conversions import ConversionRegistry
from .errors import InvalidSchema, NotFound
from .units import STATEMENT_CLASSES, SemanticUnit, StatementUnit, UnitStore
from .values import SlotValue

SLOT_DATATYPES = ("number", "text", "boolean", "ref", "timestamp")
VIOLATION_REASONS = ("missing", "wrong-datatype", "wrong-unit", "out-of-range", "not-allowed")


@dataclass(frozen=True)
class SlotSpecDef:
    role: str
    datatype: str
    unit: str | None = None
    range: tuple[Decimal, Decimal] | None = None
    allowed: tuple[SlotValue, ...] | None = None
    mandatory: bool = False

    def __post_init__(self):
        if self.datatype not in SLOT_DATATYPES:
            raise InvalidSchema(f"unknown slot datatype {self.datatype!r}")
        if self.datatype != "number" and (self.unit is not None or self.range is not None):
            raise InvalidSchema(f"slot {self.role!r}: unit/range constraints apply to numbers only")
        if self.range is not None and self.range[0] > self.range[1]:
            raise InvalidSchema(f"slot {self.role!r}: empty range {self.range}")


@dataclass(frozen=True)
class StatementSchema(SemanticUnit):
    KIND: ClassVar[str] = "schema"

    statement_class: str = "assertional"
    slots: tuple[SlotSpecDef, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if self.statement_class not in STATEMENT_CLASSES:
            raise InvalidSchema(f"unknown statement class {self.statement_class!r}")

    def slot(self, role: str) -> SlotSpecDef | None:
        for spec in self.slots:
            if spec.role == role:
                return spec
        return None


@dataclass(frozen=True)
class Violation:
    role: str
    reason: str


@dataclass(frozen=True)
class ConformanceReport:
    conformant: bool
    violations: tuple[Violation, ...] = ()


def validate_schema(schema: StatementSchema) -> None:
    if not schema.slots:
        raise InvalidSchema(f"schema {schema.id!r} has no slots")
    roles = [s.role for s in schema.slots]
    if len(roles) != len(set(roles)):
        raise InvalidSchema(f"schema {schema.id!r} has duplicate slot roles")
    if not any(s.mandatory for s in schema.slots):
        raise InvalidSchema(f"schema {schema.id!r} has no mandatory slot")


def register_schema(store: UnitStore, schema: StatementSchema) -> str:
    validate_schema(schema)
    return store.put_unit(schema)


def _check_slot(spec: SlotSpecDef, value: SlotValue, conversions: ConversionRegistry | None) -> str | None:
    """Return a violation reason for this (spec, value) pair, or None."""
    if value.kind != spec.datatype:
        return "wrong-datatype"
    if spec.datatype == "number":
        checked = value
        if spec.unit is not None and value.unit != spec.unit:
            converted = conversions.convert(value, spec.unit) if conversions else None
            if converted is None:
                return "wrong-unit"
            checked = converted
        if spec.range is not None:
            lo, hi = spec.range
            if not lo <= checked.magnitude <= hi:  # type: ignore[operator]
                return "out-of-range"
    if spec.allowed is not None and value not in spec.allowed:
        return "not-allowed"
    return None


def check_conformance(
    statement: StatementUnit,
    schema: StatementSchema,
    conversions: ConversionRegistry | None = None,
) -> ConformanceReport:
    """Pure check of one statement against one schema; lists every violation."""
    violations: list[Violation] = []
    for spec in schema.slots:
        if spec.role not in statement.slots:
            if spec.mandatory:
                violations.append(Violation(spec.role, "missing"))
            continue
        reason = _check_slot(spec, statement.slots[spec.role], conversions)
        if reason is not None:
            violations.append(Violation(spec.role, reason))
    return ConformanceReport(conformant=not violations, violations=tuple(violations))


def check_conformance_by_id(
    store: UnitStore,
    statement: StatementUnit,
    schema_id: str,
    conversions: ConversionRegistry | None = None,
) -> ConformanceReport:
    schema = store.get_unit(schema_id)
    if not isinstance(schema, StatementSchema):
        raise NotFound(f"unit {schema_id!r} is not a schema")
    return check_conformance(statement, schema, conversions)


def compatible_action_units(store: UnitStore, schema_id: str) -> list[str]:
    """Action units with an input slot typed by this schema (the structural
    operation-discovery direction: datum type -> operations that accept it)."""
    if schema_id not in store:
        raise NotFound(f"no unit {schema_id!r}")
    from .actions import ActionUnit

    found = []
    for unit in store.units():
        if isinstance(unit, ActionUnit):
            if any(slot.direction == "input" and slot.schema_id == schema_id for slot in unit.inputs):
                found.append(unit.id)
    return sorted(found)
