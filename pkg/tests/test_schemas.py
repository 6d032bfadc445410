from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aku.actions import ActionUnit, SlotSpec
from aku.conversions import ConversionRegistry
from aku.errors import InvalidSchema, NotFound
from aku.schemas import (
    ConformanceReport,
    SlotSpecDef,
    StatementSchema,
    Violation,
    check_conformance,
    check_conformance_by_id,
    compatible_action_units,
    register_schema,
    validate_schema,
)
from aku.units import StatementUnit, UnitStore
from aku.values import SlotValue, number, text


def occurrence_schema(schema_id="t:occurrence") -> StatementSchema:
    return StatementSchema(
        id=schema_id,
        statement_class="assertional",
        slots=(
            SlotSpecDef(role="taxon", datatype="text", mandatory=True),
            SlotSpecDef(role="latitude", datatype="number", unit="deg", range=(Decimal(-90), Decimal(90)), mandatory=True),
            SlotSpecDef(role="longitude", datatype="number", unit="deg", range=(Decimal(-180), Decimal(180)), mandatory=True),
            SlotSpecDef(role="event_date", datatype="timestamp", mandatory=True),
            SlotSpecDef(role="sampling_effort", datatype="number", mandatory=True),
            SlotSpecDef(role="habitat", datatype="text", mandatory=False),
        ),
    )


def full_record(**overrides) -> StatementUnit:
    slots = {
        "taxon": text("Avicennia marina"),
        "latitude": number(Decimal("-6.35"), "deg"),
        "longitude": number(Decimal("39.2"), "deg"),
        "event_date": SlotValue(kind="timestamp", timestamp="2026-01-10T08:30:00Z"),
        "sampling_effort": number(Decimal(4)),
        "habitat": text("fringe"),
    }
    slots.update(overrides)
    slots = {k: v for k, v in slots.items() if v is not None}
    return StatementUnit(id="t:record", statement_class="assertional", slots=slots)


# ---------------------------------------------------------------------------
# registration
# ---------------------------------------------------------------------------


def test_register_occurrence_schema():
    store = UnitStore()
    assert register_schema(store, occurrence_schema()) == "t:occurrence"
    assert store.get_unit("t:occurrence") == occurrence_schema()


def test_register_rejects_zero_slots():
    with pytest.raises(InvalidSchema):
        register_schema(UnitStore(), StatementSchema(id="t:empty", slots=()))


def test_register_rejects_duplicate_roles():
    schema = StatementSchema(
        id="t:dup",
        slots=(
            SlotSpecDef(role="taxon", datatype="text", mandatory=True),
            SlotSpecDef(role="taxon", datatype="text", mandatory=False),
        ),
    )
    with pytest.raises(InvalidSchema):
        register_schema(UnitStore(), schema)


def test_register_requires_a_mandatory_slot():
    schema = StatementSchema(id="t:optional", slots=(SlotSpecDef(role="taxon", datatype="text"),))
    with pytest.raises(InvalidSchema):
        validate_schema(schema)


def test_constraints_only_for_numbers():
    with pytest.raises(InvalidSchema):
        SlotSpecDef(role="taxon", datatype="text", unit="deg")
    with pytest.raises(InvalidSchema):
        SlotSpecDef(role="taxon", datatype="text", range=(Decimal(0), Decimal(1)))


# ---------------------------------------------------------------------------
# conformance
# ---------------------------------------------------------------------------


def test_full_record_conformant():
    report = check_conformance(full_record(), occurrence_schema())
    assert report == ConformanceReport(conformant=True, violations=())


def test_missing_mandatory_slot():
    report = check_conformance(full_record(latitude=None), occurrence_schema())
    assert report.conformant is False
    assert report.violations == (Violation("latitude", "missing"),)


def test_wrong_datatype_for_timestamp():
    report = check_conformance(full_record(event_date=text("January 10th")), occurrence_schema())
    assert Violation("event_date", "wrong-datatype") in report.violations


def test_wrong_unit_and_out_of_range():
    report = check_conformance(full_record(latitude=number(Decimal(5), "rad")), occurrence_schema())
    assert Violation("latitude", "wrong-unit") in report.violations
    report = check_conformance(full_record(latitude=number(Decimal(95), "deg")), occurrence_schema())
    assert Violation("latitude", "out-of-range") in report.violations


def test_registered_conversion_repairs_unit():
    conversions = ConversionRegistry()
    conversions.register("rad", "deg", Decimal("57.29577951"))
    report = check_conformance(
        full_record(latitude=number(Decimal("0.5"), "rad")), occurrence_schema(), conversions
    )
    assert report.conformant


def test_not_allowed_value():
    schema = StatementSchema(
        id="t:enum",
        slots=(
            SlotSpecDef(role="grade", datatype="text", allowed=(text("a"), text("b")), mandatory=True),
        ),
    )
    bad = StatementUnit(id="t:s", slots={"grade": text("c")})
    assert check_conformance(bad, schema).violations == (Violation("grade", "not-allowed"),)


def test_missing_optional_slot_is_fine():
    report = check_conformance(full_record(habitat=None), occurrence_schema())
    assert report.conformant


def test_check_by_id_requires_schema(store):
    with pytest.raises(NotFound):
        check_conformance_by_id(store, full_record(), "ex:absent")


def test_conformance_is_pure():
    statement, schema = full_record(), occurrence_schema()
    assert check_conformance(statement, schema) == check_conformance(statement, schema)


_roles = st.sampled_from(["taxon", "latitude", "longitude", "event_date", "sampling_effort", "habitat"])


@settings(max_examples=60, deadline=None)
@given(st.sets(_roles, max_size=5))
def test_conformance_monotone_in_slot_removal(removed):
    """Removing non-mandatory slots keeps a conformant statement conformant;
    removing any mandatory slot breaks conformance."""
    schema = occurrence_schema()
    statement = full_record()
    mandatory = {s.role for s in schema.slots if s.mandatory}
    slots = {k: v for k, v in statement.slots.items() if k not in removed}
    trimmed = StatementUnit(id="t:trimmed", slots=slots)
    report = check_conformance(trimmed, schema)
    if removed & mandatory:
        assert not report.conformant
        assert {v.role for v in report.violations} == removed & mandatory
    else:
        assert report.conformant


# ---------------------------------------------------------------------------
# affordances
# ---------------------------------------------------------------------------


def test_affordances_on_fixture(store):
    assert compatible_action_units(store, "ex:occurrence-schema") == ["ex:derive-ebv"]


def test_affordances_missing_schema(store):
    with pytest.raises(NotFound):
        compatible_action_units(store, "ex:absent")


def test_affordances_empty_and_multiple(store):
    schema = occurrence_schema("t:unused")
    register_schema(store, schema)
    assert compatible_action_units(store, "t:unused") == []

    # two units consuming the occurrence schema, ids sorted
    clone = store.get_unit("ex:derive-ebv")
    from dataclasses import replace

    store.put_unit(replace(clone, id="ex:aaa-derive"))
    assert compatible_action_units(store, "ex:occurrence-schema") == ["ex:aaa-derive", "ex:derive-ebv"]


def test_affordances_equal_brute_force_scan(store):
    for schema_id in store.list_units(kind="schema"):
        expected = sorted(
            unit.id
            for unit in store.units()
            if isinstance(unit, ActionUnit)
            and any(s.direction == "input" and s.schema_id == schema_id for s in unit.inputs)
        )
        assert compatible_action_units(store, schema_id) == expected
