"""Action unit family: typed plan specifications with applicability gates.

An action unit bundles input/output slot specs, a plan, an applicability
condition set, and an objective. The five classes follow the operation
typing: epistemic units bridge information and material entities,
transformational units stay inside information space, intervention units
change material systems, composites order child action units, and
conditionals gate targets behind guard conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar

from .conditions import ConditionExpr
from .errors import DanglingReference, ParseFailure
from .units import SemanticUnit, UnitStore
from .values import SlotValue, parse_rfc3339

ACTION_CLASSES = ("epistemic", "transformational", "intervention", "composite", "conditional")
ATOMIC_CLASSES = ("epistemic", "transformational", "intervention")
ENTITY_KINDS = ("information", "material")
PLAN_KINDS = ("diagnostic", "algorithmic", "procedural")
OBJECTIVE_CLASSES = ("epistemic", "transformational", "intervention")
EPISTEMIC_DIRECTIONS = ("recognize", "describe", "designate")
EVIDENCE_OUTCOMES = ("success", "failure", "partial")
CONDITION_KINDS = ("referential", "formal", "contextual")


@dataclass(frozen=True)
class SlotSpec:
    role: str
    direction: str  # input | output
    entity_kind: str
    schema_id: str | None = None
    cardinality: tuple[int, int | None] = (1, 1)

    def __post_init__(self):
        if self.direction not in ("input", "output"):
            raise ParseFailure(f"slot {self.role!r}: direction must be input or output")
        if self.entity_kind not in ENTITY_KINDS:
            raise ParseFailure(f"slot {self.role!r}: unknown entity kind {self.entity_kind!r}")
        if self.entity_kind == "material" and self.schema_id is not None:
            raise ParseFailure(f"slot {self.role!r}: material slots carry no statement schema")
        lo, hi = self.cardinality
        if lo < 0 or (hi is not None and hi < lo):
            raise ParseFailure(f"slot {self.role!r}: bad cardinality {self.cardinality}")


@dataclass(frozen=True)
class PlanSpecUnit(SemanticUnit):
    KIND: ClassVar[str] = "plan"

    plan_kind: str = "procedural"
    executable: str | None = None
    directive_text: str = ""
    ordering: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if self.plan_kind not in PLAN_KINDS:
            raise ParseFailure(f"unknown plan kind {self.plan_kind!r}")
        if not self.executable and not self.directive_text:
            raise ParseFailure(f"plan {self.id!r} needs an executable name or directive text")


@dataclass(frozen=True)
class ObjectiveUnit(SemanticUnit):
    KIND: ClassVar[str] = "objective"

    objective_class: str = "intervention"
    description: str = ""
    tags: tuple[str, ...] = ()
    success_criteria: str | None = None  # id of a condition-set unit

    def __post_init__(self):
        super().__post_init__()
        if self.objective_class not in OBJECTIVE_CLASSES:
            raise ParseFailure(f"unknown objective class {self.objective_class!r}")

    def referenced_ids(self) -> tuple[str, ...]:
        refs = list(self.parts)
        if self.success_criteria:
            refs.append(self.success_criteria)
        return tuple(refs)


@dataclass(frozen=True)
class ConditionItem:
    kind: str  # referential | formal | contextual
    expr: ConditionExpr
    label: str

    def __post_init__(self):
        if self.kind not in CONDITION_KINDS:
            raise ParseFailure(f"unknown condition kind {self.kind!r}")


@dataclass(frozen=True)
class ApplicabilityConditionSet(SemanticUnit):
    KIND: ClassVar[str] = "condition-set"

    items: tuple[ConditionItem, ...] = ()


@dataclass(frozen=True)
class Binding:
    from_step: str
    from_output_role: str
    to_input_role: str


@dataclass(frozen=True)
class ChildStep:
    step_id: str
    action_unit: str
    precedes: tuple[str, ...] = ()
    bindings: tuple[Binding, ...] = ()


@dataclass(frozen=True)
class Branch:
    guard: str  # id of a condition-set unit; guards are ordered, first match wins
    action: str


@dataclass(frozen=True)
class ActionUnit(SemanticUnit):
    KIND: ClassVar[str] = "action"

    action_class: str = "intervention"  # serialized as "class"
    inputs: tuple[SlotSpec, ...] = ()
    outputs: tuple[SlotSpec, ...] = ()
    plan: str = ""
    conditions: str = ""
    objective: str = ""
    context_requirements: tuple[str, ...] = ()
    children: tuple[ChildStep, ...] = ()
    branches: tuple[Branch, ...] = ()
    else_action: str | None = None
    direction: str | None = None  # epistemic only: recognize | describe | designate

    def __post_init__(self):
        super().__post_init__()
        if self.action_class not in ACTION_CLASSES:
            raise ParseFailure(f"unknown action class {self.action_class!r}")
        if self.direction is not None and self.direction not in EPISTEMIC_DIRECTIONS:
            raise ParseFailure(f"unknown epistemic direction {self.direction!r}")

    def referenced_ids(self) -> tuple[str, ...]:
        refs = list(self.parts)
        for anchor in (self.plan, self.conditions, self.objective, self.else_action):
            if anchor:
                refs.append(anchor)
        for slot in self.inputs + self.outputs:
            if slot.schema_id:
                refs.append(slot.schema_id)
        for child in self.children:
            refs.append(child.action_unit)
        for branch in self.branches:
            refs.extend((branch.guard, branch.action))
        return tuple(refs)


@dataclass(frozen=True)
class EvidenceUnit(SemanticUnit):
    KIND: ClassVar[str] = "evidence"

    action_unit: str = ""
    context: str = ""
    outcome: str = "success"
    metrics: dict[str, SlotValue] = field(default_factory=dict)
    recorded_at: str = "1970-01-01T00:00:00Z"

    def __post_init__(self):
        super().__post_init__()
        if self.outcome not in EVIDENCE_OUTCOMES:
            raise ParseFailure(f"unknown evidence outcome {self.outcome!r}")
        parse_rfc3339(self.recorded_at)

    def referenced_ids(self) -> tuple[str, ...]:
        return self.parts + (self.action_unit, self.context)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


# --------------------------------------------------------------------------
# Structural validation
# --------------------------------------------------------------------------


def topological_order(children: tuple[ChildStep, ...]) -> list[str] | None:
    """Kahn's algorithm over `precedes` edges; None when cyclic. Ready steps
    are taken in step_id order so the result is deterministic."""
    ids = [c.step_id for c in children]
    successors = {c.step_id: [s for s in c.precedes if s in set(ids)] for c in children}
    indegree = {sid: 0 for sid in ids}
    for sid, succs in successors.items():
        for succ in succs:
            indegree[succ] += 1
    ready = sorted(sid for sid, deg in indegree.items() if deg == 0)
    order: list[str] = []
    while ready:
        current = ready.pop(0)
        order.append(current)
        for succ in successors[current]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                ready.append(succ)
        ready.sort()
    return order if len(order) == len(ids) else None


def _transitive_predecessors(children: tuple[ChildStep, ...]) -> dict[str, set[str]]:
    order = topological_order(children) or [c.step_id for c in children]
    by_id = {c.step_id: c for c in children}
    preds: dict[str, set[str]] = {sid: set() for sid in by_id}
    for sid in order:
        for succ in by_id[sid].precedes:
            if succ in preds:
                preds[succ] |= preds[sid] | {sid}
    return preds


def _resolve(store: UnitStore, unit_id: str, expected_type, what: str):
    if unit_id not in store:
        raise DanglingReference(f"{what} {unit_id!r} does not resolve")
    unit = store.get_unit(unit_id)
    if not isinstance(unit, expected_type):
        raise DanglingReference(f"{what} {unit_id!r} is not a {expected_type.__name__}")
    return unit


def _kinds(slots: tuple[SlotSpec, ...]) -> set[str]:
    return {s.entity_kind for s in slots}


def validate_action_unit(au: ActionUnit, store: UnitStore) -> ValidationReport:
    """Check every class invariant; each violation names the broken rule."""
    violations: list[str] = []

    for anchor, what, expected in (
        (au.plan, "plan", PlanSpecUnit),
        (au.conditions, "condition set", ApplicabilityConditionSet),
        (au.objective, "objective", ObjectiveUnit),
    ):
        if not anchor:
            violations.append(f"action unit must reference exactly one {what}")
            continue
        _resolve(store, anchor, expected, what)

    cls = au.action_class
    if cls in ATOMIC_CLASSES and au.objective:
        objective = store.get_unit(au.objective)
        if isinstance(objective, ObjectiveUnit) and objective.objective_class != cls:
            violations.append(
                f"objective class {objective.objective_class!r} does not match action class {cls!r}"
            )

    if au.context_requirements and cls not in ("intervention", "epistemic"):
        violations.append("context requirements apply to intervention and epistemic units only")
    if au.direction is not None and cls != "epistemic":
        violations.append("direction applies to epistemic units only")
    if au.children and cls != "composite":
        violations.append("children apply to composite units only")
    if (au.branches or au.else_action) and cls != "conditional":
        violations.append("branches apply to conditional units only")

    if cls == "transformational":
        if any(s.entity_kind != "information" for s in au.inputs):
            violations.append("transformational inputs must be information")
        if any(s.entity_kind != "information" for s in au.outputs):
            violations.append("transformational outputs must be information")
        if not au.inputs or not au.outputs:
            violations.append("transformational units take information in and produce information out")
    elif cls == "intervention":
        if not any(s.entity_kind == "material" for s in au.inputs):
            violations.append("intervention units need at least one material input")
        if not any(s.entity_kind == "material" for s in au.outputs):
            violations.append("intervention units need at least one material output")
        if au.conditions:
            condition_set = store.get_unit(au.conditions)
            if isinstance(condition_set, ApplicabilityConditionSet) and not condition_set.items:
                violations.append("intervention units need a non-empty applicability condition set")
    elif cls == "epistemic":
        if _kinds(au.inputs) | _kinds(au.outputs) != {"information", "material"}:
            violations.append("epistemic slots must span information and material entities")
        if au.direction in ("describe", "designate") and not any(
            s.entity_kind == "information" for s in au.outputs
        ):
            violations.append("describe/designate units need an information output")
        if au.direction == "recognize" and not any(s.entity_kind == "material" for s in au.outputs):
            violations.append("recognize units need a material-reference output")
    elif cls == "composite":
        violations.extend(_validate_composite(au, store))
    elif cls == "conditional":
        violations.extend(_validate_conditional(au, store))

    return ValidationReport(ok=not violations, violations=tuple(violations))


def _validate_composite(au: ActionUnit, store: UnitStore) -> list[str]:
    violations: list[str] = []
    if not au.children:
        violations.append("composite units need at least one child step")
        return violations

    ids = [c.step_id for c in au.children]
    if len(ids) != len(set(ids)):
        violations.append("composite step ids must be unique")
        return violations
    known = set(ids)
    for child in au.children:
        for succ in child.precedes:
            if succ not in known:
                violations.append(f"step {child.step_id!r} precedes unknown step {succ!r}")

    if topological_order(au.children) is None:
        violations.append("precedes cycle among composite steps")
        return violations

    child_units: dict[str, ActionUnit] = {}
    for child in au.children:
        child_units[child.step_id] = _resolve(store, child.action_unit, ActionUnit, "child action unit")
    if _composite_nesting_cycle(au, store):
        violations.append("composite nesting cycle")
        return violations

    preds = _transitive_predecessors(au.children)
    for child in au.children:
        for binding in child.bindings:
            if binding.from_step not in known:
                violations.append(
                    f"step {child.step_id!r} binds from unknown step {binding.from_step!r}"
                )
                continue
            if binding.from_step not in preds[child.step_id]:
                violations.append(
                    f"binding source {binding.from_step!r} does not precede step {child.step_id!r}"
                )
                continue
            source = child_units[binding.from_step]
            target = child_units[child.step_id]
            out_slot = next(
                (s for s in source.outputs if s.role == binding.from_output_role), None
            )
            in_slot = next((s for s in target.inputs if s.role == binding.to_input_role), None)
            if out_slot is None or in_slot is None:
                violations.append(
                    f"binding {binding.from_step}.{binding.from_output_role} -> "
                    f"{child.step_id}.{binding.to_input_role} names missing slots"
                )
            elif out_slot.entity_kind != in_slot.entity_kind or out_slot.schema_id != in_slot.schema_id:
                violations.append(
                    f"binding {binding.from_step}.{binding.from_output_role} -> "
                    f"{child.step_id}.{binding.to_input_role} is type-incompatible"
                )
    return violations


def _composite_nesting_cycle(root: ActionUnit, store: UnitStore) -> bool:
    seen: set[str] = set()
    stack = [root.id]
    while stack:
        current = stack.pop()
        unit = store.get_unit(current) if current != root.id else root
        if not isinstance(unit, ActionUnit):
            continue
        for child in unit.children:
            if child.action_unit == root.id:
                return True
            if child.action_unit not in seen:
                seen.add(child.action_unit)
                stack.append(child.action_unit)
    return False


def _validate_conditional(au: ActionUnit, store: UnitStore) -> list[str]:
    violations: list[str] = []
    if not au.branches:
        violations.append("conditional units need at least one branch")
    for index, branch in enumerate(au.branches):
        _resolve(store, branch.guard, ApplicabilityConditionSet, f"branch {index} guard")
        _resolve(store, branch.action, ActionUnit, f"branch {index} action")
    if au.else_action:
        _resolve(store, au.else_action, ActionUnit, "else action")
    return violations


def grounding_level(
    store: UnitStore,
    au_id: str,
    context_id: str | None = None,
    *,
    conversions=None,
    promotion_threshold: int = 1,
):
    """Classify an action unit on the structural -> applicable -> validated
    ladder. Returns (level, report); report is None without a context.

    The unit alone is structural knowledge. With a context whose evaluation
    verdict is applicable it is applicable knowledge, and it is validated
    once enough success evidence from contexts that themselves evaluate
    applicable has accumulated (threshold configurable, default 1).
    """
    from . import engine

    au = store.get_unit(au_id)
    if not isinstance(au, ActionUnit):
        raise DanglingReference(f"unit {au_id!r} is not an action unit")
    if context_id is None:
        return "structural", None
    report = engine.evaluate_action_unit(
        store,
        au_id,
        context_id,
        conversions=conversions,
        promotion_threshold=promotion_threshold,
    )
    if report.verdict != "applicable":
        return "structural", report
    if report.grade == "validated":
        return "validated", report
    return "applicable", report
