"""Three-valued evaluation of applicability conditions against situations.

Missing data is never silently false: a comparison over an unasserted path
is UNKNOWN, and connectives combine per Kleene (AND is UNSAT-dominant, OR is
SAT-dominant). The one deliberate closed-world exception is EXISTS, which
tests record presence, not world presence. Every data problem becomes a
diagnostic that feeds the report's gap list instead of an error.

Verdicts aggregate per-condition values (applicable / inapplicable /
undetermined) and the grade refines an applicable verdict by evidence:
validated (promotion criterion met), supported (only observed assertions
consulted), or plausible (some satisfaction rests on inferred/assumed data).
"""

from __future__ import annotations

from dataclasses import dataclass

from .actions import (
    ActionUnit,
    ApplicabilityConditionSet,
    ConditionItem,
    EvidenceUnit,
    validate_action_unit,
)
from .conditions import (
    And,
    Attested,
    Between,
    Cmp,
    ConditionExpr,
    Exists,
    In,
    Not,
    Or,
    SchemaConforms,
    TriValue,
    kleene_and,
    kleene_not,
    kleene_or,
)
from .conversions import ConversionRegistry
from .errors import InvalidActionUnit, NotFound, WrongFrame
from .schemas import StatementSchema, check_conformance
from .units import Assertion, ContextUnit, StatementUnit, UnitStore
from .values import SlotValue, parse_rfc3339, split_path

VERDICTS = ("applicable", "inapplicable", "undetermined")
GRADES = ("validated", "supported", "plausible", "unknown", "inapplicable")
GAP_REASONS = ("missing-data", "violated", "unattested", "unit-mismatch", "nonconformant")

_VERDICT_RANK = {"applicable": 0, "undetermined": 1, "inapplicable": 2}
_GRADE_RANK = {"validated": 0, "supported": 1, "plausible": 2, "unknown": 3, "inapplicable": 4}


@dataclass(frozen=True)
class SupportRef:
    """Reference to a context assertion consulted during evaluation."""

    subject: str
    attribute: str
    value: SlotValue
    quality: str
    observed_at: str


@dataclass(frozen=True)
class _LeafNote:
    """Per-leaf outcome used to derive gaps; `reason` is a gap reason, or
    "satisfied" for SAT leaves (kept so negated conditions still name a
    concrete datum)."""

    value: TriValue
    reason: str
    needed: str


@dataclass(frozen=True)
class EvalOutcome:
    value: TriValue
    support: tuple[SupportRef, ...] = ()
    notes: tuple[_LeafNote, ...] = ()


@dataclass(frozen=True)
class PerCondition:
    label: str
    kind: str
    value: TriValue
    support: tuple[SupportRef, ...] = ()


@dataclass(frozen=True)
class Gap:
    condition_label: str
    reason: str
    needed: str


@dataclass(frozen=True)
class ApplicabilityReport:
    action_unit: str
    context: str
    per_condition: tuple[PerCondition, ...]
    verdict: str
    grade: str
    gaps: tuple[Gap, ...]

    def sat_fraction(self) -> float:
        if not self.per_condition:
            return 1.0
        sat = sum(1 for c in self.per_condition if c.value is TriValue.SAT)
        return sat / len(self.per_condition)


@dataclass(frozen=True)
class Flip:
    label: str
    from_value: TriValue
    to_value: TriValue


@dataclass(frozen=True)
class WhatIfDiff:
    overrides: tuple[Assertion, ...]
    before: ApplicabilityReport
    after: ApplicabilityReport
    flips: tuple[Flip, ...]


# --------------------------------------------------------------------------
# Expression evaluation
# --------------------------------------------------------------------------


class _Env:
    """Evaluation snapshot: current assertions plus counterfactual overlay.

    Overrides take precedence over the latest-wins view regardless of
    timestamps; a counterfactual replaces the current value outright.
    """

    def __init__(
        self,
        store: UnitStore,
        context: ContextUnit,
        conversions: ConversionRegistry | None,
        overrides: tuple[Assertion, ...] = (),
    ):
        self.store = store
        self.context = context
        self.conversions = conversions or ConversionRegistry()
        self.current = context.current()
        self.overlay = {(o.subject, o.attribute): o for o in overrides}

    def lookup(self, subject: str, attribute: str) -> Assertion | None:
        key = (subject, attribute)
        if key in self.overlay:
            return self.overlay[key]
        return self.current.get(key)

    def all_current(self):
        merged = dict(self.current)
        merged.update(self.overlay)
        return merged


def _support_ref(assertion: Assertion) -> SupportRef:
    return SupportRef(
        subject=assertion.subject,
        attribute=assertion.attribute,
        value=assertion.value,
        quality=assertion.quality,
        observed_at=assertion.observed_at,
    )


def _compare(op: str, value: SlotValue, literal: SlotValue, conversions: ConversionRegistry):
    """Compare an asserted value against a literal.

    Returns (TriValue, comparable) where comparable=False means the pair is
    not commensurable (kind mismatch, missing conversion, or an ordering op
    on an unordered kind).
    """
    if literal.kind == "number":
        converted = conversions.convert(value, literal.unit or "1")
        if converted is None:
            return TriValue.UNKNOWN, False
        left, right = converted.magnitude, literal.magnitude
    elif literal.kind == "timestamp":
        if value.kind != "timestamp":
            return TriValue.UNKNOWN, False
        left, right = parse_rfc3339(value.timestamp or ""), parse_rfc3339(literal.timestamp or "")
    elif literal.kind == "text":
        if value.kind != "text" or op not in ("==", "!="):
            return TriValue.UNKNOWN, False
        left, right = value.text, literal.text
    elif literal.kind == "boolean":
        if value.kind != "boolean" or op not in ("==", "!="):
            return TriValue.UNKNOWN, False
        left, right = value.boolean, literal.boolean
    else:  # ref
        if value.kind != "ref" or op not in ("==", "!="):
            return TriValue.UNKNOWN, False
        left, right = value.ref, literal.ref

    outcome = {
        "<": lambda: left < right,
        "<=": lambda: left <= right,
        ">": lambda: left > right,
        ">=": lambda: left >= right,
        "==": lambda: left == right,
        "!=": lambda: left != right,
    }[op]()
    return (TriValue.SAT if outcome else TriValue.UNSAT), True


def _eval_path_clause(expr, env: _Env) -> EvalOutcome:
    subject, attribute = split_path(expr.path)
    assertion = env.lookup(subject, attribute)

    if isinstance(expr, Exists):
        if assertion is None:
            return EvalOutcome(TriValue.UNSAT, (), (_LeafNote(TriValue.UNSAT, "violated", expr.path),))
        return EvalOutcome(
            TriValue.SAT,
            (_support_ref(assertion),),
            (_LeafNote(TriValue.SAT, "satisfied", expr.path),),
        )

    if assertion is None:
        return EvalOutcome(TriValue.UNKNOWN, (), (_LeafNote(TriValue.UNKNOWN, "missing-data", expr.path),))
    support = (_support_ref(assertion),)

    if isinstance(expr, Cmp):
        value, comparable = _compare(expr.op, assertion.value, expr.literal, env.conversions)
    elif isinstance(expr, Between):
        lo_side, lo_ok = _compare(">=", assertion.value, expr.lo, env.conversions)
        hi_side, hi_ok = _compare("<=", assertion.value, expr.hi, env.conversions)
        comparable = lo_ok and hi_ok
        value = kleene_and(lo_side, hi_side) if comparable else TriValue.UNKNOWN
    else:  # In
        comparable = False
        value = TriValue.UNSAT
        for member in expr.values:
            member_value, member_ok = _compare("==", assertion.value, member, env.conversions)
            comparable = comparable or member_ok
            if member_value is TriValue.SAT:
                value = TriValue.SAT
                break
        if not comparable:
            value = TriValue.UNKNOWN

    if not comparable:
        note = _LeafNote(TriValue.UNKNOWN, "unit-mismatch", expr.path)
    elif value is TriValue.UNSAT:
        note = _LeafNote(TriValue.UNSAT, "violated", expr.path)
    else:
        note = _LeafNote(TriValue.SAT, "satisfied", expr.path)
    return EvalOutcome(value, support, (note,))


def _eval_schema_conforms(expr: SchemaConforms, env: _Env) -> EvalOutcome:
    schema = env.store.get_unit(expr.schema_id)
    if not isinstance(schema, StatementSchema):
        raise NotFound(f"unit {expr.schema_id!r} is not a schema")
    bound = _bound_statements(env.store, env.context, expr.schema_id)
    if not bound:
        return EvalOutcome(
            TriValue.UNKNOWN, (), (_LeafNote(TriValue.UNKNOWN, "nonconformant", expr.schema_id),)
        )
    reports = [check_conformance(s, schema, env.conversions) for s in bound]
    if all(r.conformant for r in reports):
        return EvalOutcome(TriValue.SAT, (), (_LeafNote(TriValue.SAT, "satisfied", expr.schema_id),))
    return EvalOutcome(TriValue.UNSAT, (), (_LeafNote(TriValue.UNSAT, "nonconformant", expr.schema_id),))


def _bound_statements(store: UnitStore, context: ContextUnit, schema_id: str) -> list[StatementUnit]:
    """Statements bound to a context for schema conformance: parts of the
    context, or statements about it, that declare the schema."""
    bound = []
    parts = set(context.parts)
    for unit in store.units():
        if not isinstance(unit, StatementUnit) or unit.schema_id != schema_id:
            continue
        if unit.id in parts or unit.about == context.id:
            bound.append(unit)
    return bound


def _eval_attested(expr: Attested, env: _Env) -> EvalOutcome:
    wanted = f"attested:{expr.capability}"
    for (subject, attribute), assertion in sorted(env.all_current().items()):
        if attribute == wanted and assertion.value.kind == "boolean" and assertion.value.boolean:
            return EvalOutcome(
                TriValue.SAT,
                (_support_ref(assertion),),
                (_LeafNote(TriValue.SAT, "satisfied", expr.capability),),
            )
    return EvalOutcome(
        TriValue.UNKNOWN, (), (_LeafNote(TriValue.UNKNOWN, "unattested", expr.capability),)
    )


def _merge(value: TriValue, *outcomes: EvalOutcome) -> EvalOutcome:
    support: list[SupportRef] = []
    notes: list[_LeafNote] = []
    for outcome in outcomes:
        for item in outcome.support:
            if item not in support:
                support.append(item)
        notes.extend(outcome.notes)
    return EvalOutcome(value, tuple(support), tuple(notes))


def _evaluate(expr: ConditionExpr, env: _Env) -> EvalOutcome:
    if isinstance(expr, (Cmp, Between, In, Exists)):
        return _eval_path_clause(expr, env)
    if isinstance(expr, SchemaConforms):
        return _eval_schema_conforms(expr, env)
    if isinstance(expr, Attested):
        return _eval_attested(expr, env)
    if isinstance(expr, And):
        left, right = _evaluate(expr.l, env), _evaluate(expr.r, env)
        return _merge(kleene_and(left.value, right.value), left, right)
    if isinstance(expr, Or):
        left, right = _evaluate(expr.l, env), _evaluate(expr.r, env)
        return _merge(kleene_or(left.value, right.value), left, right)
    if isinstance(expr, Not):
        inner = _evaluate(expr.e, env)
        return _merge(kleene_not(inner.value), inner)
    raise TypeError(f"not a ConditionExpr: {expr!r}")


def evaluate_condition(
    store: UnitStore,
    expr: ConditionExpr,
    context: ContextUnit | str,
    *,
    conversions: ConversionRegistry | None = None,
    overrides: tuple[Assertion, ...] = (),
) -> EvalOutcome:
    """Evaluate one expression against a situation context's current state."""
    ctx = store.get_unit(context) if isinstance(context, str) else context
    if not isinstance(ctx, ContextUnit):
        raise NotFound(f"unit {context!r} is not a context")
    if ctx.frame != "situation":
        raise WrongFrame(f"context {ctx.id!r} has frame {ctx.frame!r}; evaluation targets situations")
    return _evaluate(expr, _Env(store, ctx, conversions, overrides))


# --------------------------------------------------------------------------
# Action-unit evaluation and reports
# --------------------------------------------------------------------------


def effective_condition_items(store: UnitStore, au: ActionUnit) -> tuple[ConditionItem, ...]:
    """A transformational unit with an empty condition set is gated purely by
    schema conformance, so one formal item is derived per schema-typed input."""
    condition_set = store.get_unit(au.conditions)
    if not isinstance(condition_set, ApplicabilityConditionSet):
        raise NotFound(f"unit {au.conditions!r} is not a condition set")
    if condition_set.items or au.action_class != "transformational":
        return condition_set.items
    derived = []
    for slot in au.inputs:
        if slot.direction == "input" and slot.schema_id:
            derived.append(
                ConditionItem(
                    kind="formal",
                    expr=SchemaConforms(slot.role, slot.schema_id),
                    label=f"input {slot.role} conforms to {slot.schema_id}",
                )
            )
    return tuple(derived)


def _gap_for(item: ConditionItem, outcome: EvalOutcome) -> Gap:
    target = outcome.value
    for note in outcome.notes:
        if note.value is target:
            return Gap(item.label, note.reason, note.needed)
    # e.g. NOT over a satisfied leaf: name the datum that satisfied it
    for note in outcome.notes:
        reason = "violated" if target is TriValue.UNSAT else "missing-data"
        return Gap(item.label, reason, note.needed)
    return Gap(item.label, "violated" if target is TriValue.UNSAT else "missing-data", item.label)


def evaluate_action_unit(
    store: UnitStore,
    au_id: str,
    context_id: str,
    *,
    conversions: ConversionRegistry | None = None,
    overrides: tuple[Assertion, ...] = (),
    promotion_threshold: int = 1,
    check_promotion: bool = True,
) -> ApplicabilityReport:
    """Evaluate an action unit's condition set against a situation context."""
    au = store.get_unit(au_id)
    if not isinstance(au, ActionUnit):
        raise NotFound(f"unit {au_id!r} is not an action unit")
    validation = validate_action_unit(au, store)
    if not validation.ok:
        raise InvalidActionUnit(f"action unit {au_id!r} is invalid", detail=list(validation.violations))
    ctx = store.get_unit(context_id)
    if not isinstance(ctx, ContextUnit):
        raise NotFound(f"unit {context_id!r} is not a context")
    if ctx.frame != "situation":
        raise WrongFrame(f"context {context_id!r} has frame {ctx.frame!r}; evaluation targets situations")

    env = _Env(store, ctx, conversions, overrides)
    items = effective_condition_items(store, au)
    per_condition: list[PerCondition] = []
    gaps: list[Gap] = []
    for item in items:
        outcome = _evaluate(item.expr, env)
        per_condition.append(PerCondition(item.label, item.kind, outcome.value, outcome.support))
        if outcome.value is not TriValue.SAT:
            gaps.append(_gap_for(item, outcome))

    values = [c.value for c in per_condition]
    if any(v is TriValue.UNSAT for v in values):
        verdict = "inapplicable"
    elif all(v is TriValue.SAT for v in values):
        verdict = "applicable"
    else:
        verdict = "undetermined"

    if verdict == "inapplicable":
        grade = "inapplicable"
    elif verdict == "undetermined":
        grade = "unknown"
    else:
        promoted = check_promotion and promotion_satisfied(
            store, au_id, conversions=conversions, threshold=promotion_threshold
        )
        if promoted:
            grade = "validated"
        elif all(ref.quality == "observed" for c in per_condition for ref in c.support):
            grade = "supported"
        else:
            grade = "plausible"

    return ApplicabilityReport(
        action_unit=au_id,
        context=context_id,
        per_condition=tuple(per_condition),
        verdict=verdict,
        grade=grade,
        gaps=tuple(gaps),
    )


def promotion_satisfied(
    store: UnitStore,
    au_id: str,
    *,
    conversions: ConversionRegistry | None = None,
    threshold: int = 1,
) -> bool:
    """Empirical-support criterion for the validated rung: at least
    `threshold` success evidence units whose own contexts still evaluate
    applicable for this unit (the in-model proxy for "comparable context")."""
    if threshold < 1:
        threshold = 1
    count = 0
    context_cache: dict[str, bool] = {}
    for unit in store.units():
        if not isinstance(unit, EvidenceUnit):
            continue
        if unit.action_unit != au_id or unit.outcome != "success":
            continue
        applicable = context_cache.get(unit.context)
        if applicable is None:
            try:
                report = evaluate_action_unit(
                    store,
                    au_id,
                    unit.context,
                    conversions=conversions,
                    check_promotion=False,
                )
                applicable = report.verdict == "applicable"
            except (NotFound, WrongFrame):
                applicable = False
            context_cache[unit.context] = applicable
        if applicable:
            count += 1
            if count >= threshold:
                return True
    return False


def what_if(
    store: UnitStore,
    au_id: str,
    context_id: str,
    overrides: tuple[Assertion, ...],
    *,
    conversions: ConversionRegistry | None = None,
    promotion_threshold: int = 1,
) -> WhatIfDiff:
    """Counterfactual overlay: re-evaluate with overrides applied on top of
    the current state, mutating nothing, and list the flipped conditions."""
    before = evaluate_action_unit(
        store, au_id, context_id, conversions=conversions, promotion_threshold=promotion_threshold
    )
    after = evaluate_action_unit(
        store,
        au_id,
        context_id,
        conversions=conversions,
        overrides=tuple(overrides),
        promotion_threshold=promotion_threshold,
    )
    flips = tuple(
        Flip(b.label, b.value, a.value)
        for b, a in zip(before.per_condition, after.per_condition)
        if b.value is not a.value
    )
    return WhatIfDiff(overrides=tuple(overrides), before=before, after=after, flips=flips)


def verdict_rank(verdict: str) -> int:
    return _VERDICT_RANK[verdict]


def grade_rank(grade: str) -> int:
    return _GRADE_RANK[grade]
