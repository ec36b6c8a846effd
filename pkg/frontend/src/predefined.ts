/** Predefined annotation types the admin can pick instead of a custom format. */

import type { ComponentSpec } from "./types.js";

export const PREDEFINED_TYPES: Record<string, ComponentSpec[]> = {
  "Text Summarization": [
    { type: "text", properties: {} },
    { type: "textbox", properties: {} },
  ],
  "Fake News Detection": [
    { type: "text", properties: {} },
    { type: "button", properties: { contents: ["Real", "Fake", "Unverifiable"] } },
  ],
  "Word Segmentation": [{ type: "selection", properties: { contents: [] } }],
  "Text to SQL": [
    { type: "table", properties: {} },
    { type: "textbox", properties: {} },
  ],
  "Text Chunking": [
    { type: "dropdown", properties: { contents: ["NP", "VP", "PP"] } },
  ],
  "Semantic Similarity": [
    { type: "slider", properties: { min: 0, max: 5, step: 0.5 } },
  ],
  "Evidence and Answer": [
    { type: "selection", properties: { contents: [] } },
    { type: "textbox", properties: {} },
  ],
};
