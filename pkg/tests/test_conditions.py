from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aku.conditions import (
    And,
    Attested,
    Between,
    Cmp,
    Exists,
    In,
    Not,
    Or,
    SchemaConforms,
    TriValue,
    kleene_and,
    kleene_not,
    kleene_or,
    parse_condition,
    parse_literal,
    paths_of,
    to_source,
)
from aku.errors import DslSyntaxError, UnitSyntaxError
from aku.values import SlotValue, number

# ---------------------------------------------------------------------------
# Kleene tables
# ---------------------------------------------------------------------------

S, U, K = TriValue.SAT, TriValue.UNSAT, TriValue.UNKNOWN


@pytest.mark.parametrize(
    "left,right,expected",
    [
        (S, S, S), (S, U, U), (S, K, K),
        (U, S, U), (U, U, U), (U, K, U),
        (K, S, K), (K, U, U), (K, K, K),
    ],
)
def test_kleene_and_table(left, right, expected):
    assert kleene_and(left, right) is expected


@pytest.mark.parametrize(
    "left,right,expected",
    [
        (S, S, S), (S, U, S), (S, K, S),
        (U, S, S), (U, U, U), (U, K, K),
        (K, S, S), (K, U, K), (K, K, K),
    ],
)
def test_kleene_or_table(left, right, expected):
    assert kleene_or(left, right) is expected


def test_kleene_not_table():
    assert kleene_not(S) is U
    assert kleene_not(U) is S
    assert kleene_not(K) is K


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_between_clause_parses():
    expr = parse_condition("site.tidal_inundation_pct BETWEEN 20 pct AND 75 pct")
    assert expr == Between(
        "site.tidal_inundation_pct", number(Decimal(20), "pct"), number(Decimal(75), "pct")
    )


def test_precedence_not_binds_tighter_than_and():
    expr = parse_condition("NOT a.x == 1 AND b.y > 2")
    assert isinstance(expr, And)
    assert isinstance(expr.l, Not)
    assert isinstance(expr.l.e, Cmp)
    assert isinstance(expr.r, Cmp)


def test_or_is_lowest_precedence():
    expr = parse_condition("a.x == 1 OR b.y == 2 AND c.z == 3")
    assert isinstance(expr, Or)
    assert isinstance(expr.r, And)


def test_and_chain_left_associative():
    expr = parse_condition("a.x == 1 AND b.y == 2 AND c.z == 3")
    assert isinstance(expr, And)
    assert isinstance(expr.l, And)


def test_between_inside_conjunction_is_unambiguous():
    expr = parse_condition("a.x BETWEEN 20 AND 75 AND b.y > 2")
    assert isinstance(expr, And)
    assert isinstance(expr.l, Between)


def test_missing_literal_reports_position():
    with pytest.raises(DslSyntaxError) as excinfo:
        parse_condition("a.x >")
    assert excinfo.value.position == 5


def test_between_unit_mismatch_is_unit_syntax_error():
    with pytest.raises(UnitSyntaxError):
        parse_condition("a.x BETWEEN 20 pct AND 75 psu")


def test_between_inverted_bounds_rejected():
    with pytest.raises(DslSyntaxError):
        parse_condition("a.x BETWEEN 75 AND 20")


def test_in_clause_and_literals():
    expr = parse_condition('a.kind IN {"sandy", "clay"}')
    assert expr == In("a.kind", (SlotValue(kind="text", text="sandy"), SlotValue(kind="text", text="clay")))


def test_special_clauses():
    assert parse_condition("EXISTS a.x") == Exists("a.x")
    assert parse_condition("SCHEMA(occurrences, ex:occurrence-schema)") == SchemaConforms(
        "occurrences", "ex:occurrence-schema"
    )
    assert parse_condition("ATTESTED(species_identification_competence)") == Attested(
        "species_identification_competence"
    )


def test_boolean_and_ref_and_timestamp_literals():
    assert parse_condition("a.x == false") == Cmp("a.x", "==", SlotValue(kind="boolean", boolean=False))
    assert parse_condition("a.x == ex:thing") == Cmp("a.x", "==", SlotValue(kind="ref", ref="ex:thing"))
    expr = parse_condition("a.x >= @2026-01-01T00:00:00Z")
    assert expr.literal.kind == "timestamp"


def test_bare_path_is_not_a_clause():
    with pytest.raises(DslSyntaxError):
        parse_condition("a.x")


def test_keyword_is_not_a_unit_token():
    expr = parse_condition("a.x > 5 AND b.y > 6")
    assert expr.l.literal.unit == "1"


def test_parse_literal_entry_point():
    assert parse_literal("28 psu") == number(Decimal(28), "psu")
    assert parse_literal("true") == SlotValue(kind="boolean", boolean=True)
    with pytest.raises(DslSyntaxError):
        parse_literal("28 psu extra")


# ---------------------------------------------------------------------------
# Printing round-trip
# ---------------------------------------------------------------------------

_paths = st.sampled_from(["a.x", "b.y", "c.z", "ex:site-A.salinity_psu"])
_numbers = st.integers(min_value=-50, max_value=50).map(lambda n: number(Decimal(n), "pct"))
_literals = st.one_of(
    _numbers,
    st.sampled_from(
        [
            SlotValue(kind="boolean", boolean=True),
            SlotValue(kind="boolean", boolean=False),
            SlotValue(kind="text", text='quo"ted'),
            SlotValue(kind="text", text="plain"),
            SlotValue(kind="ref", ref="ex:unit-1"),
            SlotValue(kind="timestamp", timestamp="2026-01-01T00:00:00Z"),
        ]
    ),
)


def _clauses():
    cmp_ops = st.sampled_from(["<", "<=", ">", ">=", "==", "!="])
    return st.one_of(
        st.builds(Cmp, _paths, cmp_ops, _literals),
        st.builds(
            lambda p, lo, hi: Between(p, number(Decimal(min(lo, hi)), "pct"), number(Decimal(max(lo, hi)), "pct")),
            _paths,
            st.integers(-20, 20),
            st.integers(-20, 20),
        ),
        st.builds(lambda p, vs: In(p, tuple(vs)), _paths, st.lists(_literals, min_size=1, max_size=3)),
        st.builds(Exists, _paths),
        st.builds(SchemaConforms, st.sampled_from(["occurrences", "record"]), st.sampled_from(["ex:s1", "ex:s2"])),
        st.builds(Attested, st.sampled_from(["competence_a", "competence_b"])),
    )


_exprs = st.recursive(
    _clauses(),
    lambda children: st.one_of(
        st.builds(Not, children),
        st.builds(And, children, children),
        st.builds(Or, children, children),
    ),
    max_leaves=12,
)


@settings(max_examples=300, deadline=None)
@given(_exprs)
def test_print_parse_round_trip(expr):
    assert parse_condition(to_source(expr)) == expr


@settings(max_examples=100, deadline=None)
@given(_exprs)
def test_paths_of_covers_all_leaf_paths(expr):
    source = to_source(expr)
    for path in paths_of(expr):
        assert path in source
