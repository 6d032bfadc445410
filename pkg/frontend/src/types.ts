/**
 * Wire types mirroring the gateway's JSON exactly.
 *
 * The workbench is a pure client: it renders these objects and never
 * derives its own verdicts or statuses from raw data.
 */

export type TriStatus = "SAT" | "UNSAT" | "UNKNOWN";
export type Verdict = "applicable" | "inapplicable" | "undetermined";
export type Grade = "validated" | "supported" | "plausible" | "unknown" | "inapplicable";
export type Quality = "observed" | "inferred" | "assumed";
export type GapReason = "missing-data" | "violated" | "unattested" | "unit-mismatch" | "nonconformant";

export type SlotValue =
  | { number: { magnitude: string; unit: string } }
  | { text: string }
  | { boolean: boolean }
  | { ref: string }
  | { timestamp: string };

export interface AssertionObj {
  subject: string;
  attribute: string;
  value: SlotValue;
  quality: Quality;
  observed_at: string;
  provenance: string;
}

export interface SupportRef {
  subject: string;
  attribute: string;
  value: SlotValue;
  quality: Quality;
  observed_at: string;
}

export interface ConditionRow {
  label: string;
  kind: "referential" | "formal" | "contextual";
  value: TriStatus;
  support: SupportRef[];
}

export interface GapObj {
  condition_label: string;
  reason: GapReason;
  needed: string;
}

export interface Report {
  action_unit: string;
  context: string;
  per_condition: ConditionRow[];
  verdict: Verdict;
  grade: Grade;
  gaps: GapObj[];
}

export interface Flip {
  label: string;
  from: TriStatus;
  to: TriStatus;
}

export interface WhatIfDiff {
  overrides: AssertionObj[];
  before: Report;
  after: Report;
  flips: Flip[];
}

export interface ContextUnitObj {
  id: string;
  kind: "context";
  label: string;
  frame: "situation" | "document" | "activity";
  assertions: AssertionObj[];
}

export interface SlotSpecObj {
  role: string;
  direction: "input" | "output";
  entity_kind: "information" | "material";
  schema_id?: string;
  cardinality: { min: number; max: number | null };
}

export interface ManualTaskObj {
  execution_id: string;
  step_id: string;
  directive_text: string;
  required_outputs: SlotSpecObj[];
}

export interface StepObj {
  step_id: string;
  action_unit: string;
  applicability_snapshot?: Report;
  inputs: Record<string, SlotValue>;
  outputs: Record<string, SlotValue>;
  executor: "automatic" | "manual";
  outcome: "success" | "failure" | "partial" | "pending";
  precedes: string[];
  started_order?: number;
  completed_order?: number;
}

export type ExecutionStatus =
  | "pending"
  | "running"
  | "waiting_manual"
  | "completed"
  | "failed"
  | "blocked_inapplicable"
  | "blocked_undetermined";

export interface ExecutionObj {
  id: string;
  kind: "execution";
  action_unit: string;
  context: string;
  status: ExecutionStatus;
  steps: StepObj[];
  feedback: { subject: string; attribute: string; observed_at: string; provenance: string }[];
  started_at: string;
  ended_at?: string;
  blocking_report?: Report;
}

export interface RankedCandidateObj {
  action_unit: string;
  report: Report;
  level: "structural" | "applicable" | "validated";
}

export interface ApiErrorObj {
  code: "not_found" | "conflict" | "invalid" | "blocked" | "internal" | "unreachable";
  message: string;
  detail?: unknown;
}

export type Envelope<T> = { ok: true; data: T } | { ok: false; error: ApiErrorObj };
