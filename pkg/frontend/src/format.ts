/**
 * Slot value display and input parsing.
 *
 * Input forms match the engine's literal syntax: `40`, `40 pct`, `true`,
 * quoted text, `@2026-01-01T00:00:00Z` timestamps, and CURIE-like refs
 * (`ex:site-A`). Anything unrecognizable and unquoted falls back to text,
 * except malformed numbers/timestamps which are field errors.
 */

import type { SlotValue } from "./types.js";

const NUMBER_RE = /^(-?\d+(?:\.\d+)?)(?:\s+([A-Za-z][A-Za-z0-9_]*))?$/;
const REF_RE = /^[A-Za-z][A-Za-z0-9_.-]*:[A-Za-z0-9_.:-]+$/;
const TIMESTAMP_RE = /^\d{4}-\d{2}-\d{2}T[0-9:.+Z-]+$/;

export function formatSlotValue(value: SlotValue): string {
  if ("number" in value) {
    const { magnitude, unit } = value.number;
    return unit === "1" ? magnitude : `${magnitude} ${unit}`;
  }
  if ("text" in value) return value.text;
  if ("boolean" in value) return value.boolean ? "true" : "false";
  if ("ref" in value) return value.ref;
  return `@${value.timestamp}`;
}

export interface ParseResult {
  value?: SlotValue;
  error?: string;
}

export function parseSlotValueInput(raw: string): ParseResult {
  const input = raw.trim();
  if (!input) return { error: "a value is required" };

  if (input === "true") return { value: { boolean: true } };
  if (input === "false") return { value: { boolean: false } };

  if (input.startsWith("@")) {
    const ts = input.slice(1);
    if (!TIMESTAMP_RE.test(ts)) return { error: "not an RFC 3339 timestamp" };
    return { value: { timestamp: ts } };
  }

  if (input.startsWith('"')) {
    if (input.length < 2 || !input.endsWith('"')) return { error: "unterminated quoted text" };
    return { value: { text: input.slice(1, -1) } };
  }

  const numberMatch = NUMBER_RE.exec(input);
  if (numberMatch) {
    return {
      value: { number: { magnitude: numberMatch[1]!, unit: numberMatch[2] ?? "1" } },
    };
  }
  if (/^-?\d/.test(input)) return { error: "malformed number (use e.g. \"40 pct\")" };

  if (REF_RE.test(input)) return { value: { ref: input } };

  return { value: { text: input } };
}

export function describeSupport(subject: string, attribute: string, value: SlotValue): string {
  return `${subject}.${attribute} = ${formatSlotValue(value)}`;
}
