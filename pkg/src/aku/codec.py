"""Canonical (de)serialization: bundle files and the gateway wire format.

One object model, one serializer. Bundle files are `aku-bundle/1`: a single
JSON object with sorted keys and a sorted `units` array, so saved stores
diff cleanly and round-trip exactly. The gateway reuses the same object
builders, which is what makes CLI `--json` output byte-equal to HTTP data.

Conventions: optional/None fields are omitted; numeric magnitudes are
decimal strings (exactness survives JSON); timestamps are RFC 3339 strings;
slot values are single-key tagged objects like {"number": {...}}.
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import orchestration
from .actions import (
    ActionUnit,
    ApplicabilityConditionSet,
    Binding,
    Branch,
    ChildStep,
    ConditionItem,
    EvidenceUnit,
    ObjectiveUnit,
    PlanSpecUnit,
    SlotSpec,
)
from .conditions import TriValue, parse_condition, to_source
from .engine import ApplicabilityReport, Gap, PerCondition, SupportRef, WhatIfDiff
from .errors import IoFailure, ParseFailure
from .schemas import ConformanceReport, SlotSpecDef, StatementSchema
from .units import Assertion, CompoundUnit, ContextUnit, Provenance, SemanticUnit, StatementUnit, UnitStore
from .values import SlotValue

BUNDLE_FORMAT = "aku-bundle/1"


def canonical_json(obj) -> str:
    """Deterministic compact JSON: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _clean(obj: dict) -> dict:
    return {k: v for k, v in obj.items() if v is not None}


# --------------------------------------------------------------------------
# Values
# --------------------------------------------------------------------------


def slot_value_to_obj(value: SlotValue) -> dict:
    if value.kind == "number":
        return {"number": {"magnitude": str(value.magnitude), "unit": value.unit}}
    if value.kind == "text":
        return {"text": value.text}
    if value.kind == "boolean":
        return {"boolean": value.boolean}
    if value.kind == "ref":
        return {"ref": value.ref}
    return {"timestamp": value.timestamp}


def slot_value_from_obj(obj) -> SlotValue:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseFailure(f"bad slot value {obj!r}")
    kind, payload = next(iter(obj.items()))
    if kind == "number":
        try:
            magnitude = Decimal(str(payload["magnitude"]))
        except (KeyError, InvalidOperation, TypeError) as exc:
            raise ParseFailure(f"bad number value {payload!r}") from exc
        return SlotValue(kind="number", magnitude=magnitude, unit=payload.get("unit", "1"))
    if kind == "text":
        return SlotValue(kind="text", text=str(payload))
    if kind == "boolean":
        return SlotValue(kind="boolean", boolean=bool(payload))
    if kind == "ref":
        return SlotValue(kind="ref", ref=str(payload))
    if kind == "timestamp":
        return SlotValue(kind="timestamp", timestamp=str(payload))
    raise ParseFailure(f"unknown slot value kind {kind!r}")


def _slot_map_to_obj(slots: dict[str, SlotValue]) -> dict:
    return {role: slot_value_to_obj(v) for role, v in sorted(slots.items())}


def _slot_map_from_obj(obj) -> dict[str, SlotValue]:
    return {role: slot_value_from_obj(v) for role, v in (obj or {}).items()}


def assertion_to_obj(a: Assertion) -> dict:
    return {
        "subject": a.subject,
        "attribute": a.attribute,
        "value": slot_value_to_obj(a.value),
        "quality": a.quality,
        "observed_at": a.observed_at,
        "provenance": a.provenance,
    }


def assertion_from_obj(obj) -> Assertion:
    try:
        return Assertion(
            subject=obj["subject"],
            attribute=obj["attribute"],
            value=slot_value_from_obj(obj["value"]),
            quality=obj.get("quality", "observed"),
            observed_at=obj.get("observed_at", "1970-01-01T00:00:00Z"),
            provenance=obj.get("provenance", ""),
        )
    except KeyError as exc:
        raise ParseFailure(f"assertion missing field {exc}") from exc


# --------------------------------------------------------------------------
# Units
# --------------------------------------------------------------------------


def _base_obj(unit: SemanticUnit) -> dict:
    return {
        "id": unit.id,
        "kind": unit.kind,
        "label": unit.label,
        "provenance": {"source": unit.provenance.source, "created_at": unit.provenance.created_at},
        "parts": list(unit.parts),
    }


def _base_kwargs(obj) -> dict:
    prov = obj.get("provenance") or {}
    return {
        "id": obj["id"],
        "label": obj.get("label", ""),
        "provenance": Provenance(
            source=prov.get("source", "unspecified"),
            created_at=prov.get("created_at", "1970-01-01T00:00:00Z"),
        ),
        "parts": tuple(obj.get("parts", ())),
    }


def slot_spec_to_obj(slot: SlotSpec) -> dict:
    lo, hi = slot.cardinality
    return _clean(
        {
            "role": slot.role,
            "direction": slot.direction,
            "entity_kind": slot.entity_kind,
            "schema_id": slot.schema_id,
            "cardinality": {"min": lo, "max": hi},
        }
    )


def slot_spec_from_obj(obj) -> SlotSpec:
    card = obj.get("cardinality") or {"min": 1, "max": 1}
    return SlotSpec(
        role=obj["role"],
        direction=obj["direction"],
        entity_kind=obj["entity_kind"],
        schema_id=obj.get("schema_id"),
        cardinality=(card.get("min", 1), card.get("max")),
    )


def _unit_payload(unit) -> dict:
    if isinstance(unit, StatementUnit):
        return _clean(
            {
                "statement_class": unit.statement_class,
                "schema_id": unit.schema_id,
                "slots": _slot_map_to_obj(unit.slots),
                "about": unit.about,
                "confidence": unit.confidence,
            }
        )
    if isinstance(unit, ContextUnit):
        return {
            "frame": unit.frame,
            "assertions": [assertion_to_obj(a) for a in unit.assertions],
        }
    if isinstance(unit, StatementSchema):
        return {
            "statement_class": unit.statement_class,
            "slots": [
                _clean(
                    {
                        "role": s.role,
                        "datatype": s.datatype,
                        "unit": s.unit,
                        "range": [str(s.range[0]), str(s.range[1])] if s.range else None,
                        "allowed": [slot_value_to_obj(v) for v in s.allowed] if s.allowed else None,
                        "mandatory": s.mandatory,
                    }
                )
                for s in unit.slots
            ],
        }
    if isinstance(unit, PlanSpecUnit):
        # the unit-level "kind" is taken by the store discriminator, so the
        # plan's own diagnostic/algorithmic/procedural tag rides as plan_kind
        return _clean(
            {
                "plan_kind": unit.plan_kind,
                "executable": unit.executable,
                "directive_text": unit.directive_text,
                "ordering": [[sid, list(succs)] for sid, succs in unit.ordering] or None,
            }
        )
    if isinstance(unit, ObjectiveUnit):
        return _clean(
            {
                "objective_class": unit.objective_class,
                "description": unit.description,
                "tags": list(unit.tags),
                "success_criteria": unit.success_criteria,
            }
        )
    if isinstance(unit, ApplicabilityConditionSet):
        return {
            "items": [
                {"kind": i.kind, "expr": to_source(i.expr), "label": i.label} for i in unit.items
            ]
        }
    if isinstance(unit, ActionUnit):
        return _clean(
            {
                "class": unit.action_class,
                "inputs": [slot_spec_to_obj(s) for s in unit.inputs],
                "outputs": [slot_spec_to_obj(s) for s in unit.outputs],
                "plan": unit.plan,
                "conditions": unit.conditions,
                "objective": unit.objective,
                "context_requirements": list(unit.context_requirements) or None,
                "children": [
                    _clean(
                        {
                            "step_id": c.step_id,
                            "action_unit": c.action_unit,
                            "precedes": list(c.precedes),
                            "bindings": [
                                {
                                    "from_step": b.from_step,
                                    "from_output_role": b.from_output_role,
                                    "to_input_role": b.to_input_role,
                                }
                                for b in c.bindings
                            ],
                        }
                    )
                    for c in unit.children
                ]
                or None,
                "branches": [{"guard": b.guard, "action": b.action} for b in unit.branches] or None,
                "else_action": unit.else_action,
                "direction": unit.direction,
            }
        )
    if isinstance(unit, EvidenceUnit):
        return {
            "action_unit": unit.action_unit,
            "context": unit.context,
            "outcome": unit.outcome,
            "metrics": _slot_map_to_obj(unit.metrics),
            "recorded_at": unit.recorded_at,
        }
    if isinstance(unit, CompoundUnit) or type(unit) is SemanticUnit:
        return {}
    raise ParseFailure(f"cannot serialize unit of type {type(unit).__name__}")


def unit_to_obj(unit) -> dict:
    if isinstance(unit, orchestration.ExecutionRecord):
        return execution_to_obj(unit)
    obj = _base_obj(unit)
    obj.update(_unit_payload(unit))
    return obj


def unit_from_obj(obj) -> object:
    try:
        kind = obj["kind"]
    except (TypeError, KeyError) as exc:
        raise ParseFailure(f"unit object missing kind: {obj!r}") from exc
    base = _base_kwargs(obj)
    if kind == "statement":
        return StatementUnit(
            **base,
            statement_class=obj.get("statement_class", "assertional"),
            schema_id=obj.get("schema_id"),
            slots=_slot_map_from_obj(obj.get("slots")),
            about=obj.get("about"),
            confidence=obj.get("confidence"),
        )
    if kind == "context":
        return ContextUnit(
            **base,
            frame=obj.get("frame", "situation"),
            assertions=tuple(assertion_from_obj(a) for a in obj.get("assertions", ())),
        )
    if kind == "compound":
        return CompoundUnit(**base)
    if kind == "schema":
        return StatementSchema(
            **base,
            statement_class=obj.get("statement_class", "assertional"),
            slots=tuple(
                SlotSpecDef(
                    role=s["role"],
                    datatype=s["datatype"],
                    unit=s.get("unit"),
                    range=(Decimal(s["range"][0]), Decimal(s["range"][1])) if s.get("range") else None,
                    allowed=tuple(slot_value_from_obj(v) for v in s["allowed"])
                    if s.get("allowed")
                    else None,
                    mandatory=s.get("mandatory", False),
                )
                for s in obj.get("slots", ())
            ),
        )
    if kind == "plan":
        return PlanSpecUnit(
            **base,
            plan_kind=obj.get("plan_kind", "procedural"),
            executable=obj.get("executable"),
            directive_text=obj.get("directive_text", ""),
            ordering=tuple((sid, tuple(succs)) for sid, succs in obj.get("ordering", ())),
        )
    if kind == "objective":
        return ObjectiveUnit(
            **base,
            objective_class=obj.get("objective_class", "intervention"),
            description=obj.get("description", ""),
            tags=tuple(obj.get("tags", ())),
            success_criteria=obj.get("success_criteria"),
        )
    if kind == "condition-set":
        return ApplicabilityConditionSet(
            **base,
            items=tuple(
                ConditionItem(kind=i["kind"], expr=parse_condition(i["expr"]), label=i["label"])
                for i in obj.get("items", ())
            ),
        )
    if kind == "action":
        return ActionUnit(
            **base,
            action_class=obj.get("class", "intervention"),
            inputs=tuple(slot_spec_from_obj(s) for s in obj.get("inputs", ())),
            outputs=tuple(slot_spec_from_obj(s) for s in obj.get("outputs", ())),
            plan=obj.get("plan", ""),
            conditions=obj.get("conditions", ""),
            objective=obj.get("objective", ""),
            context_requirements=tuple(obj.get("context_requirements", ())),
            children=tuple(
                ChildStep(
                    step_id=c["step_id"],
                    action_unit=c["action_unit"],
                    precedes=tuple(c.get("precedes", ())),
                    bindings=tuple(
                        Binding(b["from_step"], b["from_output_role"], b["to_input_role"])
                        for b in c.get("bindings", ())
                    ),
                )
                for c in obj.get("children", ())
            ),
            branches=tuple(Branch(b["guard"], b["action"]) for b in obj.get("branches", ())),
            else_action=obj.get("else_action"),
            direction=obj.get("direction"),
        )
    if kind == "evidence":
        return EvidenceUnit(
            **base,
            action_unit=obj.get("action_unit", ""),
            context=obj.get("context", ""),
            outcome=obj.get("outcome", "success"),
            metrics=_slot_map_from_obj(obj.get("metrics")),
            recorded_at=obj.get("recorded_at", "1970-01-01T00:00:00Z"),
        )
    if kind == "execution":
        return execution_from_obj(obj)
    raise ParseFailure(f"unknown unit kind {kind!r}")


# --------------------------------------------------------------------------
# Reports and orchestration records
# --------------------------------------------------------------------------


def support_ref_to_obj(ref: SupportRef) -> dict:
    return {
        "subject": ref.subject,
        "attribute": ref.attribute,
        "value": slot_value_to_obj(ref.value),
        "quality": ref.quality,
        "observed_at": ref.observed_at,
    }


def support_ref_from_obj(obj) -> SupportRef:
    return SupportRef(
        subject=obj["subject"],
        attribute=obj["attribute"],
        value=slot_value_from_obj(obj["value"]),
        quality=obj["quality"],
        observed_at=obj["observed_at"],
    )


def report_to_obj(report: ApplicabilityReport) -> dict:
    return {
        "action_unit": report.action_unit,
        "context": report.context,
        "per_condition": [
            {
                "label": row.label,
                "kind": row.kind,
                "value": row.value.value,
                "support": [support_ref_to_obj(s) for s in row.support],
            }
            for row in report.per_condition
        ],
        "verdict": report.verdict,
        "grade": report.grade,
        "gaps": [
            {"condition_label": g.condition_label, "reason": g.reason, "needed": g.needed}
            for g in report.gaps
        ],
    }


def report_from_obj(obj) -> ApplicabilityReport:
    return ApplicabilityReport(
        action_unit=obj["action_unit"],
        context=obj["context"],
        per_condition=tuple(
            PerCondition(
                label=row["label"],
                kind=row["kind"],
                value=TriValue(row["value"]),
                support=tuple(support_ref_from_obj(s) for s in row.get("support", ())),
            )
            for row in obj.get("per_condition", ())
        ),
        verdict=obj["verdict"],
        grade=obj["grade"],
        gaps=tuple(
            Gap(g["condition_label"], g["reason"], g["needed"]) for g in obj.get("gaps", ())
        ),
    )


def whatif_to_obj(diff: WhatIfDiff) -> dict:
    return {
        "overrides": [assertion_to_obj(a) for a in diff.overrides],
        "before": report_to_obj(diff.before),
        "after": report_to_obj(diff.after),
        "flips": [
            {"label": f.label, "from": f.from_value.value, "to": f.to_value.value}
            for f in diff.flips
        ],
    }


def step_to_obj(step: orchestration.StepRecord) -> dict:
    return _clean(
        {
            "step_id": step.step_id,
            "action_unit": step.action_unit,
            "applicability_snapshot": report_to_obj(step.applicability_snapshot)
            if step.applicability_snapshot
            else None,
            "inputs": _slot_map_to_obj(step.inputs),
            "outputs": _slot_map_to_obj(step.outputs),
            "executor": step.executor,
            "outcome": step.outcome,
            "precedes": list(step.precedes),
            "bindings": [
                {
                    "from_step": b.from_step,
                    "from_output_role": b.from_output_role,
                    "to_input_role": b.to_input_role,
                }
                for b in step.bindings
            ],
            "started_order": step.started_order,
            "completed_order": step.completed_order,
        }
    )


def step_from_obj(obj) -> orchestration.StepRecord:
    return orchestration.StepRecord(
        step_id=obj["step_id"],
        action_unit=obj["action_unit"],
        applicability_snapshot=report_from_obj(obj["applicability_snapshot"])
        if obj.get("applicability_snapshot")
        else None,
        inputs=_slot_map_from_obj(obj.get("inputs")),
        outputs=_slot_map_from_obj(obj.get("outputs")),
        executor=obj.get("executor", "manual"),
        outcome=obj.get("outcome", "pending"),
        precedes=tuple(obj.get("precedes", ())),
        bindings=tuple(
            Binding(b["from_step"], b["from_output_role"], b["to_input_role"])
            for b in obj.get("bindings", ())
        ),
        started_order=obj.get("started_order"),
        completed_order=obj.get("completed_order"),
    )


def execution_to_obj(record: orchestration.ExecutionRecord) -> dict:
    return _clean(
        {
            "id": record.id,
            "kind": "execution",
            "action_unit": record.action_unit,
            "context": record.context,
            "status": record.status,
            "steps": [step_to_obj(s) for s in record.steps],
            "feedback": [
                {
                    "subject": f.subject,
                    "attribute": f.attribute,
                    "observed_at": f.observed_at,
                    "provenance": f.provenance,
                }
                for f in record.feedback
            ],
            "started_at": record.started_at,
            "ended_at": record.ended_at,
            "blocking_report": report_to_obj(record.blocking_report)
            if record.blocking_report
            else None,
            "evidence_on_completion": record.evidence_on_completion or None,
        }
    )


def execution_from_obj(obj) -> orchestration.ExecutionRecord:
    return orchestration.ExecutionRecord(
        id=obj["id"],
        action_unit=obj["action_unit"],
        context=obj["context"],
        status=obj.get("status", "pending"),
        steps=tuple(step_from_obj(s) for s in obj.get("steps", ())),
        feedback=tuple(
            orchestration.FeedbackRef(
                subject=f["subject"],
                attribute=f["attribute"],
                observed_at=f["observed_at"],
                provenance=f["provenance"],
            )
            for f in obj.get("feedback", ())
        ),
        started_at=obj.get("started_at", "1970-01-01T00:00:00Z"),
        ended_at=obj.get("ended_at"),
        blocking_report=report_from_obj(obj["blocking_report"]) if obj.get("blocking_report") else None,
        evidence_on_completion=bool(obj.get("evidence_on_completion", False)),
    )


def task_to_obj(task: orchestration.ManualTask) -> dict:
    return {
        "execution_id": task.execution_id,
        "step_id": task.step_id,
        "directive_text": task.directive_text,
        "required_outputs": [slot_spec_to_obj(s) for s in task.required_outputs],
    }


def candidate_to_obj(candidate: orchestration.RankedCandidate) -> dict:
    return {
        "action_unit": candidate.action_unit,
        "report": report_to_obj(candidate.report),
        "level": candidate.level,
    }


def reverse_hit_to_obj(hit: orchestration.ReverseHit) -> dict:
    return {"context_id": hit.context_id, "verdict": hit.verdict, "grade": hit.grade}


def conformance_to_obj(report: ConformanceReport) -> dict:
    return {
        "conformant": report.conformant,
        "violations": [{"role": v.role, "reason": v.reason} for v in report.violations],
    }


# --------------------------------------------------------------------------
# Bundle persistence
# --------------------------------------------------------------------------


def store_to_obj(store: UnitStore) -> dict:
    return {"format": BUNDLE_FORMAT, "units": [unit_to_obj(u) for u in store.units()]}


def dumps_bundle(store: UnitStore) -> str:
    return json.dumps(store_to_obj(store), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def save_bundle(store: UnitStore, path) -> None:
    try:
        Path(path).write_text(dumps_bundle(store), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write bundle to {path}: {exc}") from exc


def load_bundle(path) -> UnitStore:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read bundle from {path}: {exc}") from exc
    return loads_bundle(raw)


def loads_bundle(raw: str) -> UnitStore:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseFailure(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or obj.get("format") != BUNDLE_FORMAT:
        raise ParseFailure(f"not an {BUNDLE_FORMAT} bundle")
    units = [unit_from_obj(u) for u in obj.get("units", ())]
    store = UnitStore()
    store.put_units(units)
    return store
