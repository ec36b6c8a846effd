/**
 * Pure result-value logic. The server is the source of truth for
 * validation; this module mirrors the rules so mistakes surface before
 * submission, and it owns the exact submission payload shape.
 */

import type {
  ComponentSpec,
  ResultValue,
  SourcePayload,
  SubmissionBody,
  SuggestionEnvelope,
} from "./types.js";

export function emptyResultFor(component: ComponentSpec): ResultValue {
  switch (component.type) {
    case "textbox":
      return "";
    case "button":
      return 0;
    case "selection":
    case "dropdown":
      return [];
    case "slider":
      return component.properties.min ?? 0;
    default:
      return null; // text and table are display-only
  }
}

export function isSpanComponent(component: ComponentSpec): boolean {
  return component.type === "selection" || component.type === "dropdown";
}

export function isLabeledSpanComponent(component: ComponentSpec): boolean {
  return (
    component.type === "dropdown" ||
    (component.type === "selection" && (component.properties.contents ?? []).length > 0)
  );
}

/** Structural equality over result values (spans compare element-wise). */
export function resultsEqual(a: ResultValue, b: ResultValue): boolean {
  if (Array.isArray(a) && Array.isArray(b)) {
    if (a.length !== b.length) return false;
    return a.every((span, i) => {
      const other = b[i] as unknown as (number | string)[];
      const mine = span as unknown as (number | string)[];
      return (
        mine.length === other.length && mine.every((v, j) => v === other[j])
      );
    });
  }
  return a === b;
}

export function allResultsEqual(
  values: ResultValue[],
  suggestion: (ResultValue | null)[],
): boolean {
  if (values.length !== suggestion.length) return false;
  return values.every((v, i) => {
    const s = suggestion[i];
    return s === null ? true : resultsEqual(v, s);
  });
}

/** Client-side check matching the server's component invariants. */
export function validateResult(
  component: ComponentSpec,
  value: ResultValue,
  source: SourcePayload,
): string | null {
  const kind = component.type;
  if (kind === "text" || kind === "table") {
    return value === null ? null : `${kind} components carry no result`;
  }
  if (kind === "textbox") {
    return typeof value === "string" ? null : "textbox result must be text";
  }
  if (kind === "button") {
    const contents = component.properties.contents ?? [];
    if (typeof value !== "number" || !Number.isInteger(value)) {
      return "choice must be an option index";
    }
    return value >= 0 && value < contents.length ? null : "choice index out of range";
  }
  if (kind === "slider") {
    const { min = -Infinity, max = Infinity } = component.properties;
    if (typeof value !== "number") return "slider result must be a number";
    return value >= min && value <= max ? null : `score outside [${min}, ${max}]`;
  }
  // span components
  if (!Array.isArray(value)) return "span result must be a list";
  if (typeof source !== "string") {
    return value.length === 0 ? null : "span annotations require a text source";
  }
  const labeled = isLabeledSpanComponent(component);
  const contents = component.properties.contents ?? [];
  const seen: [number, number][] = [];
  for (const span of value) {
    const [start, end, label] = span as [number, number, string?];
    if (labeled) {
      if (span.length !== 3 || typeof label !== "string") {
        return "labeled span must be [start, end, label]";
      }
      if (!contents.includes(label)) return `unknown span label ${label}`;
    } else if (span.length !== 2) {
      return "span must be [start, end]";
    }
    if (!(Number.isInteger(start) && Number.isInteger(end))) {
      return "span offsets must be integers";
    }
    if (!(start >= 0 && start < end && end <= source.length)) {
      return `span (${start}, ${end}) out of bounds`;
    }
    for (const [s0, e0] of seen) {
      if (start < e0 && s0 < end) return "spans overlap";
    }
    seen.push([start, end]);
  }
  return null;
}

export function validateAll(
  format: ComponentSpec[],
  values: ResultValue[],
  source: SourcePayload,
): string[] {
  return format
    .map((component, i) => validateResult(component, values[i], source))
    .filter((e): e is string => e !== null);
}

/**
 * The exact submission body. A direct API client constructing the same
 * values must produce a byte-identical JSON serialization.
 */
export function buildSubmission(
  instanceIndex: number,
  values: ResultValue[],
  suggestion: SuggestionEnvelope | null,
): SubmissionBody {
  const shown = suggestion === null ? null : suggestion.results;
  return {
    instance_index: instanceIndex,
    results: values,
    accepted_unchanged:
      shown !== null && allResultsEqual(values, shown),
    suggestion_shown: shown,
  };
}

export function serializeSubmission(body: SubmissionBody): string {
  return JSON.stringify(body);
}
