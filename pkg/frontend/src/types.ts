/** Wire types shared with the annotation service. */

export type ComponentKind =
  | "text"
  | "textbox"
  | "button"
  | "selection"
  | "dropdown"
  | "slider"
  | "table";

export interface ComponentProperties {
  contents?: string[];
  min?: number;
  max?: number;
  step?: number;
  columns?: string[];
}

export interface ComponentSpec {
  type: ComponentKind;
  properties: ComponentProperties;
}

export type Span = [number, number];
export type LabeledSpan = [number, number, string];
export type ResultValue = string | number | null | Span[] | LabeledSpan[];

export interface TablePayload {
  columns: string[];
  rows: string[][];
}

export type SourcePayload = string | TablePayload;

export interface TaskData {
  source: SourcePayload[];
  question: string[][];
  result: { result: ResultValue }[][];
  done: (0 | 1)[];
}

export interface TaskFile {
  data: TaskData;
  format: ComponentSpec[];
}

export interface SuggestionEnvelope {
  backend: string;
  results: (ResultValue | null)[];
  confidence: number | null;
  provenance: string;
}

export interface ServedInstance {
  instance_index: number;
  source: SourcePayload;
  questions: string[];
  served_at_ms: number;
  suggestion: SuggestionEnvelope | null;
}

export interface SubmissionBody {
  instance_index: number;
  results: ResultValue[];
  accepted_unchanged: boolean;
  suggestion_shown: (ResultValue | null)[] | null;
}

export interface TaskSummary {
  task_id: string;
  backend: string;
  policy: string;
  n_instances: number;
  n_done: number;
  assignees: string[];
  format?: ComponentSpec[];
}
