"""Discovery and execution of action units with closed-loop feedback.

Forward discovery ranks action units for a situation; reverse discovery maps
one unit across all situations. Execution evaluates applicability first and
never proceeds past an UNSAT or UNKNOWN verdict: blocked means blocked, with
the triggering report attached. Composites run children in precedes order,
conditionals resolve their first satisfied guard (an UNKNOWN guard halts
rather than falling through), and steps either run a registered executor
(transformational only) or open a manual task. Completed outputs are written
back to the context as assertions carrying the execution id as provenance.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field, replace
from typing import Callable

from .actions import (
    ActionUnit,
    ApplicabilityConditionSet,
    Binding,
    EvidenceUnit,
    ObjectiveUnit,
    PlanSpecUnit,
    SlotSpec,
    validate_action_unit,
)
from .conditions import TriValue, kleene_and
from .conversions import ConversionRegistry
from .engine import (
    ApplicabilityReport,
    Gap,
    PerCondition,
    _Env,
    _evaluate,
    evaluate_action_unit,
    grade_rank,
    verdict_rank,
)
from .errors import (
    BlockedExecution,
    InvalidActionUnit,
    MissingOutput,
    NoSuchTask,
    NotFound,
    TypeMismatch,
    WrongFrame,
)
from .units import Assertion, ContextUnit, UnitStore
from .values import SlotValue, now_rfc3339

EXECUTION_STATUSES = (
    "pending",
    "running",
    "waiting_manual",
    "completed",
    "failed",
    "blocked_inapplicable",
    "blocked_undetermined",
)
STEP_OUTCOMES = ("success", "failure", "partial", "pending")


@dataclass(frozen=True)
class FeedbackRef:
    subject: str
    attribute: str
    observed_at: str
    provenance: str


@dataclass(frozen=True)
class StepRecord:
    step_id: str
    action_unit: str
    applicability_snapshot: ApplicabilityReport | None = None
    inputs: dict[str, SlotValue] = field(default_factory=dict)
    outputs: dict[str, SlotValue] = field(default_factory=dict)
    executor: str = "manual"  # automatic | manual
    outcome: str = "pending"
    # scheduling topology and ordering evidence (persisted so a reloaded
    # record can resume exactly where it stopped)
    precedes: tuple[str, ...] = ()
    bindings: tuple[Binding, ...] = ()
    started_order: int | None = None
    completed_order: int | None = None

    def completed(self) -> bool:
        return self.outcome in ("success", "partial")


@dataclass(frozen=True)
class ExecutionRecord:
    id: str
    action_unit: str
    context: str
    status: str = "pending"
    steps: tuple[StepRecord, ...] = ()
    feedback: tuple[FeedbackRef, ...] = ()
    started_at: str = "1970-01-01T00:00:00Z"
    ended_at: str | None = None
    blocking_report: ApplicabilityReport | None = None
    evidence_on_completion: bool = False

    @property
    def kind(self) -> str:
        return "execution"

    def referenced_ids(self) -> tuple[str, ...]:
        return (self.action_unit, self.context)

    def step(self, step_id: str) -> StepRecord | None:
        for step in self.steps:
            if step.step_id == step_id:
                return step
        return None


@dataclass(frozen=True)
class ManualTask:
    execution_id: str
    step_id: str
    directive_text: str
    required_outputs: tuple[SlotSpec, ...]


@dataclass(frozen=True)
class RankedCandidate:
    action_unit: str
    report: ApplicabilityReport
    level: str


@dataclass(frozen=True)
class ReverseHit:
    context_id: str
    verdict: str
    grade: str


@dataclass(frozen=True)
class BranchSelection:
    """Outcome of conditional guard evaluation.

    outcome: "branch" (index/action set), "else" (else_action may be None,
    which is the defer marker), or "blocked_undetermined" (an UNKNOWN guard
    halted selection; unknown never falls through to else).
    """

    outcome: str
    index: int | None = None
    action: str | None = None
    guard_values: tuple[TriValue, ...] = ()
    report: ApplicabilityReport | None = None


class ExecutorRegistry:
    """Name -> callable table for automatic execution. Registration is
    explicit and manual; only transformational units run automatically."""

    def __init__(self):
        self._executors: dict[str, Callable] = {}

    def register(self, name: str, fn: Callable) -> None:
        self._executors[name] = fn

    def get(self, name: str) -> Callable | None:
        return self._executors.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._executors


class Orchestrator:
    def __init__(
        self,
        store: UnitStore,
        registry: ExecutorRegistry | None = None,
        conversions: ConversionRegistry | None = None,
        promotion_threshold: int = 1,
        clock: Callable[[], str] = now_rfc3339,
    ):
        self.store = store
        self.registry = registry or ExecutorRegistry()
        self.conversions = conversions
        self.promotion_threshold = promotion_threshold
        self.clock = clock

    # ---- discovery ---------------------------------------------------------

    def discover_forward(
        self,
        context_id: str,
        objective_class: str | None = None,
        tags: tuple[str, ...] = (),
        include_inapplicable: bool = False,
    ) -> list[RankedCandidate]:
        """Rank action units for a situation, best-grounded first.

        Sort key: verdict (applicable before undetermined), then grade, then
        descending fraction of satisfied conditions, then id.
        """
        context = self.store.get_unit(context_id)
        if not isinstance(context, ContextUnit) or context.frame != "situation":
            raise WrongFrame(f"{context_id!r} is not a situation context")
        candidates: list[RankedCandidate] = []
        for unit in self.store.units():
            if not isinstance(unit, ActionUnit):
                continue
            objective = self.store.get_unit(unit.objective) if unit.objective in self.store else None
            if not isinstance(objective, ObjectiveUnit):
                continue
            if objective_class and objective.objective_class != objective_class:
                continue
            if tags and not set(tags) <= set(objective.tags):
                continue
            try:
                report = self.evaluate(unit.id, context_id)
            except InvalidActionUnit:
                continue  # structurally broken units are not actionable
            if report.verdict == "inapplicable" and not include_inapplicable:
                continue
            candidates.append(RankedCandidate(unit.id, report, _level_of(report)))
        candidates.sort(
            key=lambda c: (
                verdict_rank(c.report.verdict),
                grade_rank(c.report.grade),
                -c.report.sat_fraction(),
                c.action_unit,
            )
        )
        return candidates

    def discover_reverse(self, au_id: str) -> list[ReverseHit]:
        """Map one action unit across every situation context in the store."""
        unit = self.store.get_unit(au_id)
        if not isinstance(unit, ActionUnit):
            raise NotFound(f"unit {au_id!r} is not an action unit")
        hits = []
        for context_id in self.store.list_units(kind="context", frame="situation"):
            hits.append(self.evaluate(au_id, context_id))
        result = [ReverseHit(r.context, r.verdict, r.grade) for r in hits]
        result.sort(key=lambda h: (verdict_rank(h.verdict), h.context_id))
        return result

    def evaluate(self, au_id: str, context_id: str, overrides: tuple[Assertion, ...] = ()) -> ApplicabilityReport:
        return evaluate_action_unit(
            self.store,
            au_id,
            context_id,
            conversions=self.conversions,
            overrides=overrides,
            promotion_threshold=self.promotion_threshold,
        )

    # ---- conditional branch selection ---------------------------------------

    def select_branch(self, au_id: str, context_id: str) -> BranchSelection:
        """First-match guard walk: SAT selects, UNKNOWN halts, UNSAT moves on;
        the else branch is reached only when every guard is UNSAT."""
        au = self.store.get_unit(au_id)
        if not isinstance(au, ActionUnit) or au.action_class != "conditional":
            raise InvalidActionUnit(f"unit {au_id!r} is not a conditional action unit")
        context = self.store.get_unit(context_id)
        if not isinstance(context, ContextUnit) or context.frame != "situation":
            raise WrongFrame(f"{context_id!r} is not a situation context")

        env = _Env(self.store, context, self.conversions)
        values: list[TriValue] = []
        rows: list[PerCondition] = []
        gaps: list[Gap] = []
        for index, branch in enumerate(au.branches):
            guard = self.store.get_unit(branch.guard)
            if not isinstance(guard, ApplicabilityConditionSet):
                raise NotFound(f"guard {branch.guard!r} is not a condition set")
            value = TriValue.SAT
            support = []
            worst_note = None
            for item in guard.items:
                outcome = _evaluate(item.expr, env)
                value = kleene_and(value, outcome.value)
                support.extend(outcome.support)
                if outcome.value is not TriValue.SAT and worst_note is None:
                    for note in outcome.notes:
                        if note.value is outcome.value:
                            worst_note = (item.label, note)
                            break
            label = f"branch[{index}] -> {branch.action}"
            values.append(value)
            rows.append(PerCondition(label, "contextual", value, tuple(support)))
            if value is not TriValue.SAT and worst_note is not None:
                gaps.append(Gap(label, worst_note[1].reason, worst_note[1].needed))

            if value is TriValue.SAT:
                return BranchSelection(
                    outcome="branch", index=index, action=branch.action, guard_values=tuple(values)
                )
            if value is TriValue.UNKNOWN:
                report = ApplicabilityReport(
                    action_unit=au_id,
                    context=context_id,
                    per_condition=tuple(rows),
                    verdict="undetermined",
                    grade="unknown",
                    gaps=tuple(gaps),
                )
                return BranchSelection(
                    outcome="blocked_undetermined", guard_values=tuple(values), report=report
                )

        report = ApplicabilityReport(
            action_unit=au_id,
            context=context_id,
            per_condition=tuple(rows),
            verdict="inapplicable",
            grade="inapplicable",
            gaps=tuple(gaps),
        )
        return BranchSelection(
            outcome="else", action=au.else_action, guard_values=tuple(values), report=report
        )

    # ---- execution -----------------------------------------------------------

    def execute(
        self,
        au_id: str,
        context_id: str,
        dry_run: bool = False,
        evidence_on_completion: bool = False,
    ) -> ExecutionRecord:
        au = self.store.get_unit(au_id)
        if not isinstance(au, ActionUnit):
            raise NotFound(f"unit {au_id!r} is not an action unit")
        validation = validate_action_unit(au, self.store)
        if not validation.ok:
            raise InvalidActionUnit(f"action unit {au_id!r} is invalid", detail=list(validation.violations))

        record = ExecutionRecord(
            id=f"exec:{uuid.uuid4().hex[:12]}",
            action_unit=au_id,
            context=context_id,
            status="running",
            started_at=self.clock(),
            evidence_on_completion=evidence_on_completion,
        )

        report = self.evaluate(au_id, context_id)
        if report.verdict != "applicable":
            status = "blocked_inapplicable" if report.verdict == "inapplicable" else "blocked_undetermined"
            record = replace(record, status=status, blocking_report=report, ended_at=self.clock())
            if not dry_run:
                self.store.put_unit(record)
            return record

        planned, blocker = self._plan_steps(au, context_id)
        if blocker is not None:
            record = replace(
                record,
                status=blocker[0],
                blocking_report=blocker[1],
                steps=tuple(planned),
                ended_at=self.clock(),
            )
            if not dry_run:
                self.store.put_unit(record)
            return record

        record = replace(record, steps=tuple(planned))
        if dry_run:
            return replace(record, status="pending")

        self.store.put_unit(record)
        return self._advance(record)

    def _plan_steps(
        self, au: ActionUnit, context_id: str
    ) -> tuple[list[StepRecord], tuple[str, ApplicabilityReport | None] | None]:
        """Top-level expansion into step records. Conditionals select their
        branch here (pure guard evaluation); a blocked selection is returned
        instead of steps."""
        if au.action_class == "composite":
            steps = [
                StepRecord(
                    step_id=c.step_id,
                    action_unit=c.action_unit,
                    executor=self._executor_for(c.action_unit),
                    precedes=c.precedes,
                    bindings=c.bindings,
                )
                for c in au.children
            ]
            return steps, None
        if au.action_class == "conditional":
            selection = self.select_branch(au.id, context_id)
            if selection.outcome == "blocked_undetermined":
                return [], ("blocked_undetermined", selection.report)
            if selection.action is None:  # defer marker: all guards unsatisfied
                return [], ("blocked_inapplicable", selection.report)
            target = self.store.get_unit(selection.action)
            if not isinstance(target, ActionUnit):
                raise NotFound(f"branch target {selection.action!r} is not an action unit")
            prefix = "else" if selection.outcome == "else" else f"branch{selection.index}"
            steps, blocker = self._plan_steps(target, context_id)
            if blocker is not None:
                return steps, blocker
            if target.action_class in ("composite", "conditional"):
                renames = {s.step_id: f"{prefix}.{s.step_id}" for s in steps}
                steps = [
                    replace(
                        s,
                        step_id=renames[s.step_id],
                        precedes=tuple(renames[p] for p in s.precedes),
                        bindings=tuple(
                            Binding(renames[b.from_step], b.from_output_role, b.to_input_role)
                            for b in s.bindings
                        ),
                    )
                    for s in steps
                ]
            else:
                steps = [replace(steps[0], step_id=prefix)]
            return steps, None
        return [StepRecord(step_id="self", action_unit=au.id, executor=self._executor_for(au.id))], None

    def _executor_for(self, au_id: str) -> str:
        unit = self.store.get_unit(au_id)
        if not isinstance(unit, ActionUnit) or unit.action_class != "transformational":
            return "manual"
        plan = self.store.get_unit(unit.plan) if unit.plan in self.store else None
        if isinstance(plan, PlanSpecUnit) and plan.executable and plan.executable in self.registry:
            return "automatic"
        return "manual"

    def _next_order(self, record: ExecutionRecord) -> int:
        orders = [s.started_order or 0 for s in record.steps] + [
            s.completed_order or 0 for s in record.steps
        ]
        return max(orders, default=0) + 1

    def _ready(self, record: ExecutionRecord, step: StepRecord) -> bool:
        for other in record.steps:
            if step.step_id in other.precedes and not other.completed():
                return False
        return True

    def _advance(self, record: ExecutionRecord) -> ExecutionRecord:
        """Drive the execution as far as it can go without human input."""
        progress = True
        while progress:
            progress = False
            for step in record.steps:
                if step.outcome != "pending" or not self._ready(record, step):
                    continue
                if step.applicability_snapshot is None:
                    step_au = self.store.get_unit(step.action_unit)
                    if isinstance(step_au, ActionUnit) and step_au.action_class in ("composite", "conditional"):
                        record, blocked = self._expand_step(record, step)
                        if blocked:
                            self.store.replace_unit(record)
                            return record
                        progress = True
                        break
                    snapshot = self.evaluate(step.action_unit, record.context)
                    if snapshot.verdict != "applicable":
                        status = (
                            "blocked_inapplicable"
                            if snapshot.verdict == "inapplicable"
                            else "blocked_undetermined"
                        )
                        record = _update_step(
                            record, step.step_id, applicability_snapshot=snapshot
                        )
                        record = replace(
                            record, status=status, blocking_report=snapshot, ended_at=self.clock()
                        )
                        self.store.replace_unit(record)
                        return record
                    inputs = self._bind_inputs(record, step)
                    record = _update_step(
                        record,
                        step.step_id,
                        applicability_snapshot=snapshot,
                        inputs=inputs,
                        started_order=self._next_order(record),
                    )
                    step = record.step(step.step_id)  # refreshed
                    if step.executor == "automatic":
                        record = self._run_automatic(record, step)
                        if record.status == "failed":
                            self.store.replace_unit(record)
                            return record
                    progress = True
                    break

        if all(s.completed() for s in record.steps):
            record = self._finalize(record)
        elif any(
            s.outcome == "pending" and s.executor == "manual" and s.applicability_snapshot is not None
            for s in record.steps
        ):
            record = replace(record, status="waiting_manual")
        else:
            record = replace(record, status="failed", ended_at=self.clock())
        self.store.replace_unit(record)
        return record

    def _expand_step(self, record: ExecutionRecord, step: StepRecord) -> tuple[ExecutionRecord, bool]:
        """Replace a composite/conditional step with its expansion, splicing
        the surrounding precedes edges onto the new steps."""
        au = self.store.get_unit(step.action_unit)
        planned, blocker = self._plan_steps(au, record.context)
        if blocker is not None:
            record = replace(
                record, status=blocker[0], blocking_report=blocker[1], ended_at=self.clock()
            )
            return record, True
        renames = {s.step_id: f"{step.step_id}.{s.step_id}" for s in planned}
        inner = [
            replace(
                s,
                step_id=renames[s.step_id],
                precedes=tuple(renames[p] for p in s.precedes),
                bindings=tuple(
                    Binding(renames[b.from_step], b.from_output_role, b.to_input_role)
                    for b in s.bindings
                ),
            )
            for s in planned
        ]
        roots = [s.step_id for s in inner if not any(s.step_id in o.precedes for o in inner)]
        leaf_ids = {s.step_id for s in inner if not s.precedes}
        inner = [
            replace(s, precedes=s.precedes + step.precedes) if s.step_id in leaf_ids else s
            for s in inner
        ]
        new_steps: list[StepRecord] = []
        for existing in record.steps:
            if existing.step_id == step.step_id:
                new_steps.extend(inner)
            else:
                new_steps.append(existing)
        # nothing pointed at the removed id anymore; predecessors of the old
        # step must now gate the expansion's roots
        rewired = []
        for s in new_steps:
            if step.step_id in s.precedes:
                rewired.append(
                    replace(
                        s,
                        precedes=tuple(p for p in s.precedes if p != step.step_id) + tuple(roots),
                    )
                )
            else:
                rewired.append(s)
        return replace(record, steps=tuple(rewired)), False

    def _bind_inputs(self, record: ExecutionRecord, step: StepRecord) -> dict[str, SlotValue]:
        inputs: dict[str, SlotValue] = {}
        for binding in step.bindings:
            source = record.step(binding.from_step)
            if source is not None and binding.from_output_role in source.outputs:
                inputs[binding.to_input_role] = source.outputs[binding.from_output_role]
        return inputs

    def _run_automatic(self, record: ExecutionRecord, step: StepRecord) -> ExecutionRecord:
        au = self.store.get_unit(step.action_unit)
        plan = self.store.get_unit(au.plan)
        executor = self.registry.get(plan.executable or "")
        context = self.store.get_unit(record.context)
        try:
            outputs = executor(dict(step.inputs), context, self.store)
        except Exception:  # executor faults are step failures, not crashes
            record = _update_step(
                record,
                step.step_id,
                outcome="failure",
                completed_order=self._next_order(record),
            )
            return replace(record, status="failed", ended_at=self.clock())
        outputs = dict(outputs or {})
        record = _update_step(
            record,
            step.step_id,
            outputs=outputs,
            outcome="success",
            completed_order=self._next_order(record),
        )
        return self._write_feedback(record, step.step_id, outputs)

    def _write_feedback(
        self, record: ExecutionRecord, step_id: str, outputs: dict[str, SlotValue]
    ) -> ExecutionRecord:
        """Closed loop: completed step outputs become context assertions with
        the execution id as provenance. Dotted roles address subject.attribute
        directly; bare roles are attributed to the root action unit."""
        feedback = list(record.feedback)
        for role in sorted(outputs):
            if "." in role:
                subject, _, attribute = role.rpartition(".")
            else:
                subject, attribute = record.action_unit, role
            assertion = Assertion(
                subject=subject,
                attribute=attribute,
                value=outputs[role],
                quality="observed",
                observed_at=self.clock(),
                provenance=record.id,
            )
            self.store.add_assertion(record.context, assertion)
            feedback.append(
                FeedbackRef(
                    subject=subject,
                    attribute=attribute,
                    observed_at=assertion.observed_at,
                    provenance=record.id,
                )
            )
        return replace(record, feedback=tuple(feedback))

    def _finalize(self, record: ExecutionRecord) -> ExecutionRecord:
        root = self.store.get_unit(record.action_unit)
        unbound = [
            slot.role
            for slot in root.outputs
            if slot.cardinality[0] >= 1 and not self._bound_root_output(record, slot.role)
        ]
        if unbound:
            return replace(record, status="failed", ended_at=self.clock())
        record = replace(record, status="completed", ended_at=self.clock())
        if record.evidence_on_completion:
            outcome = "success" if all(s.outcome == "success" for s in record.steps) else "partial"
            evidence = EvidenceUnit(
                id=f"ev:{uuid.uuid4().hex[:12]}",
                label=f"evidence from {record.id}",
                action_unit=record.action_unit,
                context=record.context,
                outcome=outcome,
                recorded_at=self.clock(),
            )
            self.store.put_unit(evidence)
        return record

    def _bound_root_output(self, record: ExecutionRecord, role: str) -> bool:
        return any(role in s.outputs for s in record.steps if s.completed())

    # ---- manual tasks ----------------------------------------------------------

    def open_tasks(self, execution_id: str | None = None) -> list[ManualTask]:
        """Tasks are derived, never stored: one per manual step that has been
        reached (snapshot present) and is still pending."""
        tasks: list[ManualTask] = []
        records = (
            [self.store.get_unit(execution_id)]
            if execution_id
            else [u for u in self.store.units() if isinstance(u, ExecutionRecord)]
        )
        for record in records:
            if not isinstance(record, ExecutionRecord):
                raise NotFound(f"unit {execution_id!r} is not an execution")
            if record.status not in ("running", "waiting_manual"):
                continue
            for step in record.steps:
                if (
                    step.executor == "manual"
                    and step.outcome == "pending"
                    and step.applicability_snapshot is not None
                ):
                    au = self.store.get_unit(step.action_unit)
                    plan = self.store.get_unit(au.plan)
                    tasks.append(
                        ManualTask(
                            execution_id=record.id,
                            step_id=step.step_id,
                            directive_text=plan.directive_text,
                            required_outputs=tuple(
                                s for s in au.outputs if s.cardinality[0] >= 1
                            ),
                        )
                    )
        tasks.sort(key=lambda t: (t.execution_id, t.step_id))
        return tasks

    def complete_manual_task(
        self,
        execution_id: str,
        step_id: str,
        outputs: dict[str, SlotValue],
        outcome: str = "success",
    ) -> ExecutionRecord:
        """Close a manual step; the task is consumed exactly once."""
        if outcome not in ("success", "failure", "partial"):
            raise TypeMismatch(f"unknown step outcome {outcome!r}")
        record = self.store.get_unit(execution_id)
        if not isinstance(record, ExecutionRecord):
            raise NotFound(f"unit {execution_id!r} is not an execution")
        if record.status in ("blocked_inapplicable", "blocked_undetermined"):
            raise BlockedExecution(f"execution {execution_id!r} is {record.status}")
        step = record.step(step_id)
        if (
            step is None
            or step.executor != "manual"
            or step.outcome != "pending"
            or step.applicability_snapshot is None
            or record.status not in ("running", "waiting_manual")
        ):
            raise NoSuchTask(f"no open manual task {execution_id!r}/{step_id!r}")

        au = self.store.get_unit(step.action_unit)
        declared = {slot.role: slot for slot in au.outputs}
        for role in outputs:
            if role not in declared:
                raise TypeMismatch(f"unknown output role {role!r}")
        for slot in au.outputs:
            if slot.cardinality[0] >= 1 and slot.role not in outputs:
                raise MissingOutput(f"required output {slot.role!r} missing")
        for role, value in outputs.items():
            slot = declared[role]
            if slot.entity_kind == "material" and value.kind != "ref":
                raise TypeMismatch(f"output {role!r} must reference a material entity")
            if slot.schema_id is not None:
                if value.kind != "ref":
                    raise TypeMismatch(f"output {role!r} must reference a {slot.schema_id} statement")
                target = self.store.get_unit(value.ref)
                if getattr(target, "schema_id", None) != slot.schema_id:
                    raise TypeMismatch(
                        f"output {role!r} must reference a statement declaring schema {slot.schema_id}"
                    )

        record = _update_step(
            record,
            step_id,
            outputs=dict(outputs),
            outcome=outcome,
            completed_order=self._next_order(record),
        )
        if outcome == "failure":
            record = replace(record, status="failed", ended_at=self.clock())
            self.store.replace_unit(record)
            return record
        record = self._write_feedback(record, step_id, dict(outputs))
        record = replace(record, status="running")
        self.store.replace_unit(record)
        return self._advance(record)

    # ---- evidence ---------------------------------------------------------------

    def record_evidence(self, evidence: EvidenceUnit) -> str:
        """Store an empirical outcome; grounding reflects it on the next call."""
        return self.store.put_unit(evidence)


def _update_step(record: ExecutionRecord, step_id: str, **changes) -> ExecutionRecord:
    steps = tuple(
        replace(s, **changes) if s.step_id == step_id else s for s in record.steps
    )
    return replace(record, steps=steps)


def _level_of(report: ApplicabilityReport) -> str:
    if report.verdict != "applicable":
        return "structural"
    return "validated" if report.grade == "validated" else "applicable"
