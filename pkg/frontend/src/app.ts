/**
 * Workbench wiring: context/action pickers, report panel, what-if panel
 * with commit-as-assumed, execution panel with manual-task forms, and a
 * configurable polling loop for execution status (the gateway has no push).
 */

import { GatewayClient, GatewayError } from "./api.js";
import {
  renderContext,
  renderErrorBanner,
  renderExecution,
  renderReport,
  renderTaskForm,
  renderWhatIf,
} from "./dom.js";
import { parseSlotValueInput } from "./format.js";
import {
  buildContextView,
  buildExecutionView,
  buildReportView,
  buildTaskForm,
  buildWhatIfView,
  validateTaskForm,
} from "./views.js";
import type { AssertionObj, ManualTaskObj } from "./types.js";

interface AppConfig {
  gatewayUrl: string;
  pollIntervalMs: number;
}

const DEFAULTS: AppConfig = { gatewayUrl: "http://127.0.0.1:7468", pollIntervalMs: 2000 };

class Workbench {
  private readonly client: GatewayClient;
  private overlays: AssertionObj[] = [];
  private executionId: string | null = null;
  private pollTimer: number | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly config: AppConfig = DEFAULTS,
  ) {
    this.client = new GatewayClient(config.gatewayUrl);
  }

  private panel(id: string): HTMLElement {
    let node = this.root.querySelector<HTMLElement>(`#${id}`);
    if (!node) {
      node = document.createElement("div");
      node.id = id;
      this.root.appendChild(node);
    }
    return node;
  }

  private showError(panelId: string, err: unknown): void {
    const message =
      err instanceof GatewayError ? `${err.code}: ${err.message}` : `error: ${String(err)}`;
    const panel = this.panel(panelId);
    panel.replaceChildren(renderErrorBanner(message)); // never leave stale data behind
  }

  async start(): Promise<void> {
    const controls = this.panel("controls");
    controls.replaceChildren();
    const contextSelect = document.createElement("select");
    contextSelect.id = "context-select";
    const actionSelect = document.createElement("select");
    actionSelect.id = "action-select";
    const go = document.createElement("button");
    go.textContent = "evaluate";
    const run = document.createElement("button");
    run.textContent = "execute";
    controls.append(contextSelect, actionSelect, go, run);

    try {
      const [contexts, actions] = await Promise.all([
        this.client.listUnits("context"),
        this.client.listUnits("action"),
      ]);
      contextSelect.replaceChildren(...contexts.map((id) => new Option(id, id)));
      actionSelect.replaceChildren(...actions.map((id) => new Option(id, id)));
    } catch (err) {
      this.showError("report", err);
      return;
    }

    go.addEventListener("click", () => {
      this.overlays = [];
      void this.refreshReport(contextSelect.value, actionSelect.value);
    });
    run.addEventListener("click", () => void this.execute(contextSelect.value, actionSelect.value));
  }

  async refreshReport(contextId: string, actionUnitId: string): Promise<void> {
    try {
      const [report, context] = await Promise.all([
        this.client.evaluate(actionUnitId, contextId),
        this.client.getContext(contextId),
      ]);
      this.panel("report").replaceChildren(renderReport(buildReportView(report)));
      this.panel("context").replaceChildren(
        renderContext(buildContextView(context, this.overlays)),
      );
      this.renderWhatIfControls(contextId, actionUnitId);
    } catch (err) {
      this.showError("report", err);
    }
  }

  private renderWhatIfControls(contextId: string, actionUnitId: string): void {
    const panel = this.panel("whatif");
    panel.replaceChildren();
    const path = document.createElement("input");
    path.placeholder = "subject.attribute";
    const value = document.createElement("input");
    value.placeholder = 'value, e.g. 40 pct / true / "text"';
    const preview = document.createElement("button");
    preview.textContent = "what if";
    const commit = document.createElement("button");
    commit.textContent = "commit override as assertion";
    const message = document.createElement("span");
    message.className = "field-error";
    panel.append(path, value, preview, commit, message);

    const readOverride = (): AssertionObj | null => {
      const dot = path.value.lastIndexOf(".");
      if (dot <= 0) {
        message.textContent = "path must be subject.attribute";
        return null;
      }
      const parsed = parseSlotValueInput(value.value);
      if (parsed.error || !parsed.value) {
        message.textContent = parsed.error ?? "bad value";
        return null;
      }
      message.textContent = "";
      return {
        subject: path.value.slice(0, dot),
        attribute: path.value.slice(dot + 1),
        value: parsed.value,
        quality: "assumed",
        observed_at: new Date().toISOString().replace(/\.\d+Z$/, "Z"),
        provenance: "workbench",
      };
    };

    preview.addEventListener("click", () => {
      const override = readOverride();
      const overrides = override ? [...this.overlays, override] : this.overlays;
      void this.client
        .whatIf(actionUnitId, contextId, overrides)
        .then((diff) => {
          if (override) this.overlays = overrides;
          this.panel("whatif-result").replaceChildren(renderWhatIf(buildWhatIfView(diff)));
        })
        .catch((err) => this.showError("whatif-result", err));
    });

    commit.addEventListener("click", () => {
      const override = readOverride();
      if (!override) return;
      void this.client
        .commitOverride(contextId, override)
        .then(() => this.refreshReport(contextId, actionUnitId))
        .catch((err) => this.showError("whatif-result", err));
    });
  }

  async execute(contextId: string, actionUnitId: string): Promise<void> {
    try {
      const record = await this.client.execute(actionUnitId, contextId);
      this.executionId = record.id;
      this.renderExecutionPanel(record.id, await this.client.getExecution(record.id));
      this.startPolling();
    } catch (err) {
      this.showError("execution", err);
    }
  }

  private startPolling(): void {
    if (this.pollTimer !== null) window.clearInterval(this.pollTimer);
    this.pollTimer = window.setInterval(() => void this.poll(), this.config.pollIntervalMs);
  }

  private async poll(): Promise<void> {
    if (!this.executionId) return;
    try {
      const record = await this.client.getExecution(this.executionId);
      this.renderExecutionPanel(this.executionId, record);
      if (!["running", "waiting_manual", "pending"].includes(record.status) && this.pollTimer) {
        window.clearInterval(this.pollTimer);
        this.pollTimer = null;
      }
    } catch (err) {
      this.showError("execution", err);
    }
  }

  private renderExecutionPanel(executionId: string, record: Parameters<typeof buildExecutionView>[0]): void {
    const panel = this.panel("execution");
    panel.replaceChildren(renderExecution(buildExecutionView(record)));
    void this.client.listTasks(executionId).then((tasks) => {
      for (const task of tasks) panel.appendChild(this.taskForm(task));
    });
  }

  private taskForm(task: ManualTaskObj, errors: Record<string, string> = {}): HTMLElement {
    const form = buildTaskForm(task);
    return renderTaskForm(form, errors, (values) => {
      const validation = validateTaskForm(form, values);
      if (!validation.valid) {
        // inline validation only; nothing is posted
        const panel = this.panel("execution");
        const replacement = this.taskForm(task, validation.errors);
        panel.replaceChildren(replacement);
        return;
      }
      void this.client
        .completeTask(task.execution_id, task.step_id, validation.outputs)
        .then((record) => this.renderExecutionPanel(task.execution_id, record))
        .catch((err) => {
          if (err instanceof GatewayError && err.code === "not_found") {
            this.panel("execution").prepend(
              renderErrorBanner("task already completed elsewhere (task consumed)"),
            );
            void this.poll();
          } else {
            this.showError("execution", err);
          }
        });
    });
  }
}

export function mountWorkbench(root: HTMLElement, config?: Partial<AppConfig>): Workbench {
  const workbench = new Workbench(root, { ...DEFAULTS, ...config });
  void workbench.start();
  return workbench;
}
