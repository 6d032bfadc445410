/** Thin DOM layer: view models in, elements out. No state, no fetch. */

import type {
  ContextView,
  ExecutionView,
  ReportView,
  TaskFormView,
  WhatIfView,
  ConditionRowView,
} from "./views.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderErrorBanner(message: string): HTMLElement {
  return el("div", "banner banner-error", message);
}

function renderConditionRow(row: ConditionRowView): HTMLElement {
  const item = el("li", `condition light-${row.light}${row.flipped ? " flipped" : ""}`);
  item.appendChild(el("span", "dot", ""));
  item.appendChild(el("span", "status", row.status));
  item.appendChild(el("span", "label", row.label));
  item.appendChild(el("span", "kind", row.kind));
  if (row.flipped && row.flippedFrom) {
    item.appendChild(el("span", "flip-note", `${row.flippedFrom} → ${row.status}`));
  }
  if (row.support.length) {
    const support = el("ul", "support");
    for (const line of row.support) {
      support.appendChild(el("li", `support-line quality-${line.quality}`, `${line.text} [${line.quality}]`));
    }
    item.appendChild(support);
  }
  return item;
}

export function renderReport(view: ReportView): HTMLElement {
  const root = el("section", "report");
  const banner = el("div", `banner banner-${view.banner.tone}`, view.banner.text);
  banner.appendChild(el("span", `badge grade-${view.gradeBadge.grade}`, view.gradeBadge.text));
  root.appendChild(banner);

  const list = el("ul", "conditions");
  for (const row of view.rows) list.appendChild(renderConditionRow(row));
  root.appendChild(list);

  if (view.gaps.length) {
    const panel = el("div", "gaps");
    panel.appendChild(el("h3", undefined, "gaps"));
    const gapList = el("ul");
    for (const gap of view.gaps) gapList.appendChild(el("li", `gap gap-${gap.reason}`, gap.text));
    panel.appendChild(gapList);
    root.appendChild(panel);
  }
  return root;
}

export function renderWhatIf(view: WhatIfView): HTMLElement {
  const root = el("section", "whatif");
  if (view.notice) {
    root.appendChild(el("div", "notice", view.notice));
  }
  const overlays = el("ul", "overlays");
  for (const overlay of view.overlays) {
    overlays.appendChild(
      el("li", `overlay quality-${overlay.quality}`, `${overlay.path} = ${overlay.valueText} [${overlay.quality}]`),
    );
  }
  root.appendChild(overlays);

  const banner = el(
    "div",
    `banner banner-${view.after.banner.tone}`,
    `${view.before.banner.text} → ${view.after.banner.text}`,
  );
  root.appendChild(banner);
  const list = el("ul", "conditions");
  for (const row of view.rows) list.appendChild(renderConditionRow(row));
  root.appendChild(list);
  return root;
}

export function renderContext(view: ContextView, onEdit?: (row: number) => void): HTMLElement {
  const root = el("section", "context");
  root.appendChild(el("h3", undefined, `${view.label} (${view.contextId})`));
  const table = el("table", "assertions");
  const head = el("tr");
  for (const col of ["subject", "attribute", "value", "quality", "observed"]) {
    head.appendChild(el("th", undefined, col));
  }
  table.appendChild(head);
  view.rows.forEach((row, index) => {
    const tr = el("tr", row.overlay ? "overlay-row" : undefined);
    tr.appendChild(el("td", undefined, row.subject));
    tr.appendChild(el("td", undefined, row.attribute));
    tr.appendChild(el("td", undefined, row.valueText));
    tr.appendChild(el("td", `quality-${row.quality}`, row.quality));
    tr.appendChild(el("td", undefined, row.observed_at));
    if (onEdit) tr.addEventListener("click", () => onEdit(index));
    table.appendChild(tr);
  });
  root.appendChild(table);
  return root;
}

export function renderTaskForm(
  view: TaskFormView,
  errors: Record<string, string>,
  onSubmit: (values: Record<string, string>) => void,
): HTMLElement {
  const root = el("form", "task-form");
  root.appendChild(el("p", "directive", view.directive));
  const inputs: Record<string, HTMLInputElement> = {};
  for (const field of view.fields) {
    const wrapper = el("label", "field");
    wrapper.appendChild(el("span", undefined, `${field.role}${field.required ? " *" : ""}`));
    const input = el("input");
    input.name = field.role;
    input.placeholder = field.hint;
    inputs[field.role] = input;
    wrapper.appendChild(input);
    const fieldError = errors[field.role];
    if (fieldError) wrapper.appendChild(el("span", "field-error", fieldError));
    root.appendChild(wrapper);
  }
  const submit = el("button", undefined, "complete step");
  submit.type = "submit";
  root.appendChild(submit);
  root.addEventListener("submit", (event) => {
    event.preventDefault();
    const values: Record<string, string> = {};
    for (const [role, input] of Object.entries(inputs)) values[role] = input.value;
    onSubmit(values);
  });
  return root;
}

export function renderExecution(view: ExecutionView): HTMLElement {
  const root = el("section", "execution");
  root.appendChild(el("div", `banner banner-${view.tone}`, `${view.id}: ${view.status}`));
  const list = el("ul", "steps");
  for (const step of view.steps) {
    list.appendChild(
      el(
        "li",
        `step outcome-${step.outcome}${step.waiting ? " waiting" : ""}`,
        `${step.stepId} (${step.actionUnit}) — ${step.outcome}${step.waiting ? " [manual task open]" : ""}`,
      ),
    );
  }
  root.appendChild(list);
  if (view.blockedGaps.length) {
    const panel = el("div", "gaps");
    panel.appendChild(el("h3", undefined, "blocked by"));
    const gapList = el("ul");
    for (const gap of view.blockedGaps) gapList.appendChild(el("li", `gap gap-${gap.reason}`, gap.text));
    panel.appendChild(gapList);
    root.appendChild(panel);
  }
  return root;
}
