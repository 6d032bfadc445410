import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import type { ContextUnitObj, ManualTaskObj, Report, WhatIfDiff } from "../src/types.js";
import {
  buildContextView,
  buildReportView,
  buildTaskForm,
  buildWhatIfView,
  statusLight,
  validateTaskForm,
  verdictTone,
} from "../src/views.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8")) as T;
}

const siteA = fixture<Report>("report-site-a.json");
const siteB = fixture<Report>("report-site-b.json");
const siteC = fixture<Report>("report-site-c.json");

describe("report view faithfulness", () => {
  it("mirrors the site-A report exactly: green banner, five green rows, no gaps", () => {
    const view = buildReportView(siteA);
    expect(view.banner.verdict).toBe(siteA.verdict);
    expect(view.banner.text).toBe("applicable");
    expect(view.banner.tone).toBe("green");
    expect(view.gradeBadge.grade).toBe(siteA.grade);
    expect(view.rows.map((r) => r.status)).toEqual(siteA.per_condition.map((r) => r.value));
    expect(view.rows.map((r) => r.label)).toEqual(siteA.per_condition.map((r) => r.label));
    expect(view.rows.every((r) => r.light === "green")).toBe(true);
    expect(view.rows).toHaveLength(5);
    expect(view.gaps).toEqual([]);
  });

  it("mirrors the site-B report: red banner and the tidal gap", () => {
    const view = buildReportView(siteB);
    expect(view.banner.tone).toBe("red");
    expect(view.banner.verdict).toBe("inapplicable");
    const statuses = Object.fromEntries(view.rows.map((r) => [r.label, r.status]));
    for (const row of siteB.per_condition) {
      expect(statuses[row.label]).toBe(row.value);
    }
    expect(view.gaps.map((g) => ({ condition_label: g.label, reason: g.reason, needed: g.needed }))).toEqual(
      siteB.gaps,
    );
    expect(view.gaps[0]!.text).toContain("tidal inundation within tolerance");
  });

  it("mirrors the site-C report: amber banner, amber salinity row, needed path in gap panel", () => {
    const view = buildReportView(siteC);
    expect(view.banner.tone).toBe("amber");
    expect(view.banner.verdict).toBe("undetermined");
    const salinity = view.rows.find((r) => r.label.includes("salinity"))!;
    expect(salinity.status).toBe("UNKNOWN");
    expect(salinity.light).toBe("amber");
    expect(view.gaps).toHaveLength(1);
    expect(view.gaps[0]!.needed).toBe("site.salinity_psu");
    expect(view.gaps[0]!.text).toContain("needed: site.salinity_psu");
  });

  it("copies support lines with their quality verbatim", () => {
    const view = buildReportView(siteA);
    for (const [index, row] of view.rows.entries()) {
      expect(row.support).toHaveLength(siteA.per_condition[index]!.support.length);
      for (const line of row.support) expect(line.quality).toBe("observed");
    }
  });

  it("status/verdict palettes are fixed", () => {
    expect(statusLight("SAT")).toBe("green");
    expect(statusLight("UNSAT")).toBe("red");
    expect(statusLight("UNKNOWN")).toBe("amber");
    expect(verdictTone("applicable")).toBe("green");
    expect(verdictTone("inapplicable")).toBe("red");
    expect(verdictTone("undetermined")).toBe("amber");
  });
});

describe("what-if view", () => {
  const diff = fixture<WhatIfDiff>("whatif-site-b.json");

  it("highlights exactly the flipped rows from WhatIfDiff.flips", () => {
    const view = buildWhatIfView(diff);
    const flipped = view.rows.filter((r) => r.flipped).map((r) => r.label);
    expect(flipped).toEqual(diff.flips.map((f) => f.label));
    const row = view.rows.find((r) => r.label === diff.flips[0]!.label)!;
    expect(row.flippedFrom).toBe(diff.flips[0]!.from);
    expect(row.status).toBe(diff.flips[0]!.to);
    expect(view.notice).toBeNull();
    expect(view.after.banner.verdict).toBe("applicable");
  });

  it("keeps non-flipped rows unhighlighted", () => {
    const view = buildWhatIfView(diff);
    const untouched = view.rows.filter((r) => !r.flipped);
    expect(untouched.length).toBe(view.rows.length - diff.flips.length);
    for (const row of untouched) expect(row.flippedFrom).toBeUndefined();
  });

  it("shows overlay rows with the assumed-quality badge", () => {
    const view = buildWhatIfView(diff);
    expect(view.overlays).toEqual([
      { path: "site.tidal_inundation_pct", valueText: "40 pct", quality: "assumed" },
    ]);
  });

  it("empty override set renders the no-change notice", () => {
    const empty = fixture<WhatIfDiff>("whatif-empty.json");
    const view = buildWhatIfView(empty);
    expect(view.notice).toBe("no change");
    expect(view.rows.every((r) => !r.flipped)).toBe(true);
    expect(view.before.banner.verdict).toBe(view.after.banner.verdict);
  });
});

describe("context view", () => {
  const contextObj = fixture<ContextUnitObj>("context-site-a.json");

  it("lists every committed assertion row", () => {
    const view = buildContextView(contextObj);
    expect(view.rows).toHaveLength(contextObj.assertions.length);
    expect(view.rows.every((r) => !r.overlay)).toBe(true);
    const first = view.rows[0]!;
    expect(first.subject).toBe("site");
    expect(first.valueText).toBe("40 pct");
  });

  it("marks uncommitted overlays as visually distinct rows", () => {
    const overlay = {
      subject: "site",
      attribute: "salinity_psu",
      value: { number: { magnitude: "28", unit: "psu" } },
      quality: "assumed" as const,
      observed_at: "2026-01-16T00:00:00Z",
      provenance: "workbench",
    };
    const view = buildContextView(contextObj, [overlay]);
    const last = view.rows[view.rows.length - 1]!;
    expect(last.overlay).toBe(true);
    expect(last.quality).toBe("assumed");
  });
});

describe("manual task form", () => {
  const task = fixture<ManualTaskObj>("task-histology-prep.json");

  it("renders the directive and one field per required output", () => {
    const form = buildTaskForm(task);
    expect(form.directive).toBe(task.directive_text);
    expect(form.fields.map((f) => f.role)).toEqual(task.required_outputs.map((s) => s.role));
    expect(form.fields[0]!.required).toBe(true);
    expect(form.fields[0]!.entityKind).toBe("material");
  });

  it("flags empty required fields and does not produce outputs", () => {
    const form = buildTaskForm(task);
    const validation = validateTaskForm(form, { stained_section: "  " });
    expect(validation.valid).toBe(false);
    expect(validation.errors.stained_section).toMatch(/required/);
    expect(Object.keys(validation.outputs)).toHaveLength(0);
  });

  it("rejects non-reference values for material outputs, field-level", () => {
    const form = buildTaskForm(task);
    const validation = validateTaskForm(form, { stained_section: "just text" });
    expect(validation.valid).toBe(false);
    expect(validation.errors.stained_section).toMatch(/reference/);
  });

  it("accepts a reference and emits the wire-form outputs", () => {
    const form = buildTaskForm(task);
    const validation = validateTaskForm(form, { stained_section: "ex:stained-1" });
    expect(validation.valid).toBe(true);
    expect(validation.outputs).toEqual({ stained_section: { ref: "ex:stained-1" } });
  });
});
