/**
 * Gateway client. Every method unwraps the `{ok, data|error}` envelope and
 * throws GatewayError on failure; a network-level failure becomes code
 * "unreachable" so callers can show the error banner without stale data.
 */

import type {
  AssertionObj,
  ContextUnitObj,
  Envelope,
  ExecutionObj,
  ManualTaskObj,
  RankedCandidateObj,
  Report,
  SlotValue,
  WhatIfDiff,
} from "./types.js";

export class GatewayError extends Error {
  readonly code: string;
  readonly detail: unknown;

  constructor(code: string, message: string, detail?: unknown) {
    super(message);
    this.code = code;
    this.detail = detail;
  }
}

export class GatewayClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        headers: { "content-type": "application/json" },
        ...init,
      });
    } catch (err) {
      throw new GatewayError("unreachable", `gateway unreachable: ${String(err)}`);
    }
    let envelope: Envelope<T>;
    try {
      envelope = (await response.json()) as Envelope<T>;
    } catch {
      throw new GatewayError("unreachable", `gateway returned a non-JSON response (${response.status})`);
    }
    if (!envelope.ok) {
      throw new GatewayError(envelope.error.code, envelope.error.message, envelope.error.detail);
    }
    return envelope.data;
  }

  getContext(contextId: string): Promise<ContextUnitObj> {
    return this.request(`/units/${encodeURIComponent(contextId)}`);
  }

  listUnits(kind: string): Promise<string[]> {
    return this.request(`/units?kind=${encodeURIComponent(kind)}`);
  }

  evaluate(actionUnit: string, context: string): Promise<Report> {
    return this.request("/evaluate", {
      method: "POST",
      body: JSON.stringify({ action_unit: actionUnit, context }),
    });
  }

  whatIf(actionUnit: string, context: string, overrides: AssertionObj[]): Promise<WhatIfDiff> {
    return this.request("/whatif", {
      method: "POST",
      body: JSON.stringify({ action_unit: actionUnit, context, overrides }),
    });
  }

  discoverForward(context: string, tags?: string): Promise<RankedCandidateObj[]> {
    const query = tags ? `&tags=${encodeURIComponent(tags)}` : "";
    return this.request(`/discover/forward?context=${encodeURIComponent(context)}${query}`);
  }

  /** Commits an assertion through the gateway; the store is never touched
   * directly. What-if overrides are committed with quality=assumed. */
  addAssertion(contextId: string, assertion: AssertionObj): Promise<{ id: string }> {
    return this.request(`/contexts/${encodeURIComponent(contextId)}/assertions`, {
      method: "POST",
      body: JSON.stringify(assertion),
    });
  }

  commitOverride(contextId: string, override: AssertionObj): Promise<{ id: string }> {
    return this.addAssertion(contextId, { ...override, quality: "assumed" });
  }

  execute(actionUnit: string, context: string, dryRun = false): Promise<ExecutionObj> {
    return this.request("/execute", {
      method: "POST",
      body: JSON.stringify({ action_unit: actionUnit, context, dry_run: dryRun }),
    });
  }

  getExecution(executionId: string): Promise<ExecutionObj> {
    return this.request(`/executions/${encodeURIComponent(executionId)}`);
  }

  listTasks(executionId?: string): Promise<ManualTaskObj[]> {
    const query = executionId ? `?execution=${encodeURIComponent(executionId)}` : "";
    return this.request(`/tasks${query}`);
  }

  completeTask(
    executionId: string,
    stepId: string,
    outputs: Record<string, SlotValue>,
    outcome: "success" | "failure" | "partial" = "success",
  ): Promise<ExecutionObj> {
    return this.request(
      `/tasks/${encodeURIComponent(executionId)}/${encodeURIComponent(stepId)}/complete`,
      { method: "POST", body: JSON.stringify({ outputs, outcome }) },
    );
  }
}
