/**
 * Pure view-model builders. Everything displayed is copied from gateway
 * responses; these functions translate wire objects into renderable rows,
 * lights, and badges without inventing any aggregation of their own.
 */

import { describeSupport, formatSlotValue, parseSlotValueInput } from "./format.js";
import type {
  AssertionObj,
  ContextUnitObj,
  ExecutionObj,
  Flip,
  ManualTaskObj,
  Quality,
  Report,
  SlotValue,
  TriStatus,
  Verdict,
  WhatIfDiff,
} from "./types.js";

export type Light = "green" | "red" | "amber";

export function statusLight(status: TriStatus): Light {
  if (status === "SAT") return "green";
  if (status === "UNSAT") return "red";
  return "amber";
}

export function verdictTone(verdict: Verdict): Light {
  if (verdict === "applicable") return "green";
  if (verdict === "inapplicable") return "red";
  return "amber";
}

// ---------------------------------------------------------------------------
// Report view
// ---------------------------------------------------------------------------

export interface SupportLine {
  text: string;
  quality: Quality;
}

export interface ConditionRowView {
  label: string;
  kind: string;
  status: TriStatus;
  light: Light;
  support: SupportLine[];
  /** set by the what-if view when this row changed */
  flipped: boolean;
  flippedFrom?: TriStatus;
}

export interface GapRowView {
  label: string;
  reason: string;
  needed: string;
  text: string;
}

export interface ReportView {
  actionUnit: string;
  context: string;
  banner: { verdict: Verdict; tone: Light; text: string };
  gradeBadge: { grade: string; text: string };
  rows: ConditionRowView[];
  gaps: GapRowView[];
}

export function buildReportView(report: Report): ReportView {
  return {
    actionUnit: report.action_unit,
    context: report.context,
    banner: {
      verdict: report.verdict,
      tone: verdictTone(report.verdict),
      text: report.verdict,
    },
    gradeBadge: { grade: report.grade, text: report.grade },
    rows: report.per_condition.map((row) => ({
      label: row.label,
      kind: row.kind,
      status: row.value,
      light: statusLight(row.value),
      support: row.support.map((ref) => ({
        text: describeSupport(ref.subject, ref.attribute, ref.value),
        quality: ref.quality,
      })),
      flipped: false,
    })),
    gaps: report.gaps.map((gap) => ({
      label: gap.condition_label,
      reason: gap.reason,
      needed: gap.needed,
      text: `${gap.condition_label}: ${gap.reason} (needed: ${gap.needed})`,
    })),
  };
}

// ---------------------------------------------------------------------------
// What-if view
// ---------------------------------------------------------------------------

export interface OverlayRowView {
  path: string;
  valueText: string;
  quality: Quality; // overlays render with their quality badge (assumed)
}

export interface WhatIfView {
  before: ReportView;
  after: ReportView;
  /** rows of the after-report with flip highlighting applied */
  rows: ConditionRowView[];
  overlays: OverlayRowView[];
  flips: Flip[];
  notice: string | null; // "no change" when nothing flipped
}

export function buildWhatIfView(diff: WhatIfDiff): WhatIfView {
  const before = buildReportView(diff.before);
  const after = buildReportView(diff.after);
  const flippedFrom = new Map(diff.flips.map((flip) => [flip.label, flip.from]));
  const rows = after.rows.map((row) => ({
    ...row,
    flipped: flippedFrom.has(row.label),
    flippedFrom: flippedFrom.get(row.label),
  }));
  return {
    before,
    after,
    rows,
    overlays: diff.overrides.map((override) => ({
      path: `${override.subject}.${override.attribute}`,
      valueText: formatSlotValue(override.value),
      quality: override.quality,
    })),
    flips: diff.flips,
    notice: diff.flips.length === 0 ? "no change" : null,
  };
}

// ---------------------------------------------------------------------------
// Context view
// ---------------------------------------------------------------------------

export interface AssertionRowView {
  subject: string;
  attribute: string;
  valueText: string;
  quality: Quality;
  observed_at: string;
  overlay: boolean; // uncommitted what-if overlay rows are visually distinct
}

export interface ContextView {
  contextId: string;
  label: string;
  rows: AssertionRowView[];
}

export function buildContextView(context: ContextUnitObj, overlays: AssertionObj[] = []): ContextView {
  const committed = context.assertions.map((assertion) => ({
    subject: assertion.subject,
    attribute: assertion.attribute,
    valueText: formatSlotValue(assertion.value),
    quality: assertion.quality,
    observed_at: assertion.observed_at,
    overlay: false,
  }));
  const overlaid = overlays.map((assertion) => ({
    subject: assertion.subject,
    attribute: assertion.attribute,
    valueText: formatSlotValue(assertion.value),
    quality: assertion.quality,
    observed_at: assertion.observed_at,
    overlay: true,
  }));
  return { contextId: context.id, label: context.label, rows: [...committed, ...overlaid] };
}

// ---------------------------------------------------------------------------
// Manual-task form
// ---------------------------------------------------------------------------

export interface TaskFieldView {
  role: string;
  entityKind: "information" | "material";
  schemaId?: string;
  required: boolean;
  hint: string;
}

export interface TaskFormView {
  executionId: string;
  stepId: string;
  directive: string;
  fields: TaskFieldView[];
}

export function buildTaskForm(task: ManualTaskObj): TaskFormView {
  return {
    executionId: task.execution_id,
    stepId: task.step_id,
    directive: task.directive_text,
    fields: task.required_outputs.map((slot) => ({
      role: slot.role,
      entityKind: slot.entity_kind,
      schemaId: slot.schema_id,
      required: slot.cardinality.min >= 1,
      hint:
        slot.entity_kind === "material"
          ? "reference, e.g. ex:stained-1"
          : slot.schema_id
            ? `reference to a ${slot.schema_id} statement`
            : 'value, e.g. 40 pct / true / "text"',
    })),
  };
}

export interface TaskFormValidation {
  errors: Record<string, string>;
  outputs: Record<string, SlotValue>;
  valid: boolean;
}

/** Field-level validation; submission must not happen unless `valid`. */
export function validateTaskForm(
  form: TaskFormView,
  values: Record<string, string>,
): TaskFormValidation {
  const errors: Record<string, string> = {};
  const outputs: Record<string, SlotValue> = {};
  for (const field of form.fields) {
    const raw = (values[field.role] ?? "").trim();
    if (!raw) {
      if (field.required) errors[field.role] = "this output is required";
      continue;
    }
    const parsed = parseSlotValueInput(raw);
    if (parsed.error || !parsed.value) {
      errors[field.role] = parsed.error ?? "unparseable value";
      continue;
    }
    if (field.entityKind === "material" && !("ref" in parsed.value)) {
      errors[field.role] = "material outputs must be references (ex:...)";
      continue;
    }
    outputs[field.role] = parsed.value;
  }
  return { errors, outputs, valid: Object.keys(errors).length === 0 };
}

// ---------------------------------------------------------------------------
// Execution view
// ---------------------------------------------------------------------------

export interface ExecutionView {
  id: string;
  status: string;
  tone: Light;
  steps: { stepId: string; actionUnit: string; outcome: string; executor: string; waiting: boolean }[];
  blockedGaps: GapRowView[];
}

export function buildExecutionView(record: ExecutionObj): ExecutionView {
  const tone: Light =
    record.status === "completed"
      ? "green"
      : record.status === "waiting_manual" || record.status === "running" || record.status === "pending"
        ? "amber"
        : "red";
  const blocked = record.blocking_report ? buildReportView(record.blocking_report).gaps : [];
  return {
    id: record.id,
    status: record.status,
    tone,
    steps: record.steps.map((step) => ({
      stepId: step.step_id,
      actionUnit: step.action_unit,
      outcome: step.outcome,
      executor: step.executor,
      waiting:
        step.executor === "manual" &&
        step.outcome === "pending" &&
        step.applicability_snapshot !== undefined,
    })),
    blockedGaps: blocked,
  };
}
