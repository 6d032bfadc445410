import { describe, expect, it } from "vitest";

import { formatSlotValue, parseSlotValueInput } from "../src/format.js";
import type { SlotValue } from "../src/types.js";

describe("slot value formatting", () => {
  it("renders numbers with units, hiding the dimensionless token", () => {
    expect(formatSlotValue({ number: { magnitude: "40", unit: "pct" } })).toBe("40 pct");
    expect(formatSlotValue({ number: { magnitude: "0.3", unit: "1" } })).toBe("0.3");
  });

  it("renders the other kinds", () => {
    expect(formatSlotValue({ text: "fringe" })).toBe("fringe");
    expect(formatSlotValue({ boolean: false })).toBe("false");
    expect(formatSlotValue({ ref: "ex:site-A" })).toBe("ex:site-A");
    expect(formatSlotValue({ timestamp: "2026-01-01T00:00:00Z" })).toBe("@2026-01-01T00:00:00Z");
  });
});

describe("slot value input parsing", () => {
  const cases: Array<[string, SlotValue]> = [
    ["40 pct", { number: { magnitude: "40", unit: "pct" } }],
    ["-2.5", { number: { magnitude: "-2.5", unit: "1" } }],
    ["true", { boolean: true }],
    ["false", { boolean: false }],
    ['"two words"', { text: "two words" }],
    ["ex:site-A", { ref: "ex:site-A" }],
    ["@2026-01-01T00:00:00Z", { timestamp: "2026-01-01T00:00:00Z" }],
    ["plainword", { text: "plainword" }],
  ];

  it.each(cases)("parses %s", (input, expected) => {
    expect(parseSlotValueInput(input)).toEqual({ value: expected });
  });

  it("round-trips format -> parse for every kind", () => {
    for (const [, value] of cases) {
      const rendered = formatSlotValue(value);
      const reparsed = parseSlotValueInput("text" in value ? `"${value.text}"` : rendered);
      expect(reparsed.value).toEqual(value);
    }
  });

  it("reports field-level errors", () => {
    expect(parseSlotValueInput("").error).toMatch(/required/);
    expect(parseSlotValueInput("40 pct pct").error).toMatch(/number/);
    expect(parseSlotValueInput('"unterminated').error).toMatch(/quoted/);
    expect(parseSlotValueInput("@notadate").error).toMatch(/timestamp/);
  });
});
