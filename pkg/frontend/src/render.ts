/**
 * DOM renderers, one per component kind. Components render in spec order;
 * each exposes its current value, and suggestion values pre-fill the widget
 * with a distinct style plus a one-click clear affordance.
 */

import {
  emptyResultFor,
  isLabeledSpanComponent,
  isSpanComponent,
  resultsEqual,
} from "./results.js";
import type {
  ComponentSpec,
  LabeledSpan,
  ResultValue,
  SourcePayload,
  Span,
  SuggestionEnvelope,
} from "./types.js";

export interface RenderedComponent {
  root: HTMLElement;
  getValue(): ResultValue;
  setValue(value: ResultValue): void;
  /** Programmatic span entry point; mirrors cursor highlighting. */
  addSpan?(start: number, end: number, label?: string): void;
  clearSuggestion(): void;
  readonly dirty: boolean;
}

export interface RenderedScreen {
  root: HTMLElement;
  components: RenderedComponent[];
  getValues(): ResultValue[];
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function sourceText(source: SourcePayload): string {
  return typeof source === "string" ? source : "";
}

function renderSourceBlock(doc: Document, source: SourcePayload): HTMLElement {
  if (typeof source === "string") {
    return el(doc, "pre", "source-text", source);
  }
  const table = el(doc, "table", "source-table");
  const head = el(doc, "tr");
  for (const column of source.columns) head.appendChild(el(doc, "th", "", column));
  table.appendChild(head);
  for (const row of source.rows) {
    const tr = el(doc, "tr");
    for (const cell of row) tr.appendChild(el(doc, "td", "", cell));
    table.appendChild(tr);
  }
  return table;
}

class BaseComponent implements RenderedComponent {
  root: HTMLElement;
  dirty = false;
  protected suggestionBadge: HTMLElement | null = null;
  protected suggested: ResultValue | null = null;

  constructor(
    protected doc: Document,
    protected spec: ComponentSpec,
    question: string,
  ) {
    this.root = el(doc, "div", `component component-${spec.type}`);
    if (question) this.root.appendChild(el(doc, "p", "question", question));
  }

  getValue(): ResultValue {
    return emptyResultFor(this.spec);
  }

  setValue(_value: ResultValue): void {}

  installSuggestion(value: ResultValue | null): void {
    if (value === null) return;
    this.suggested = value;
    this.setValue(value);
    this.dirty = false;
    this.root.classList.add("suggested");
    const badge = el(this.doc, "button", "clear-suggestion", "clear suggestion");
    badge.addEventListener("click", () => this.clearSuggestion());
    this.root.appendChild(badge);
    this.suggestionBadge = badge;
  }

  clearSuggestion(): void {
    if (this.suggestionBadge) {
      this.suggestionBadge.remove();
      this.suggestionBadge = null;
    }
    this.root.classList.remove("suggested");
    this.suggested = null;
    this.setValue(emptyResultFor(this.spec));
    this.dirty = true;
  }

  protected markDirty(): void {
    this.dirty = true;
    this.root.classList.remove("suggested");
  }
}

class TextComponent extends BaseComponent {
  getValue(): ResultValue {
    return null;
  }
}

class TableComponent extends BaseComponent {
  constructor(doc: Document, spec: ComponentSpec, question: string, source: SourcePayload) {
    super(doc, spec, question);
    this.root.appendChild(renderSourceBlock(doc, source));
  }

  getValue(): ResultValue {
    return null;
  }
}

class TextboxComponent extends BaseComponent {
  private area: HTMLTextAreaElement;

  constructor(doc: Document, spec: ComponentSpec, question: string) {
    super(doc, spec, question);
    this.area = el(doc, "textarea", "textbox-input");
    this.area.addEventListener("input", () => this.markDirty());
    this.root.appendChild(this.area);
  }

  getValue(): ResultValue {
    return this.area.value;
  }

  setValue(value: ResultValue): void {
    this.area.value = typeof value === "string" ? value : "";
  }
}

class ButtonComponent extends BaseComponent {
  private selected = 0;
  private buttons: HTMLButtonElement[] = [];

  constructor(doc: Document, spec: ComponentSpec, question: string) {
    super(doc, spec, question);
    const row = el(doc, "div", "button-row");
    (spec.properties.contents ?? []).forEach((label, index) => {
      const button = el(doc, "button", "choice", label);
      button.addEventListener("click", () => {
        this.selected = index;
        this.markDirty();
        this.refresh();
      });
      this.buttons.push(button);
      row.appendChild(button);
    });
    this.root.appendChild(row);
    this.refresh();
  }

  private refresh(): void {
    this.buttons.forEach((b, i) =>
      b.classList.toggle("selected", i === this.selected),
    );
  }

  getValue(): ResultValue {
    return this.selected;
  }

  setValue(value: ResultValue): void {
    if (typeof value === "number") this.selected = value;
    this.refresh();
  }
}

class SliderComponent extends BaseComponent {
  private input: HTMLInputElement;
  private display: HTMLElement;

  constructor(doc: Document, spec: ComponentSpec, question: string) {
    super(doc, spec, question);
    this.input = el(doc, "input", "slider-input");
    this.input.type = "range";
    this.input.min = String(spec.properties.min ?? 0);
    this.input.max = String(spec.properties.max ?? 1);
    this.input.step = String(spec.properties.step ?? 1);
    this.input.value = String(spec.properties.min ?? 0);
    this.display = el(doc, "span", "slider-value", this.input.value);
    this.input.addEventListener("input", () => {
      this.display.textContent = this.input.value;
      this.markDirty();
    });
    this.root.appendChild(this.input);
    this.root.appendChild(this.display);
  }

  getValue(): ResultValue {
    return Number(this.input.value);
  }

  setValue(value: ResultValue): void {
    if (typeof value === "number") {
      this.input.value = String(value);
      this.display.textContent = this.input.value;
    }
  }
}

class SpanComponent extends BaseComponent {
  private spans: (Span | LabeledSpan)[] = [];
  private labeled: boolean;
  private text: string;
  private listNode: HTMLElement;
  private textNode: HTMLElement;
  private picker: HTMLSelectElement | null = null;

  constructor(doc: Document, spec: ComponentSpec, question: string, source: SourcePayload) {
    super(doc, spec, question);
    this.labeled = isLabeledSpanComponent(spec);
    this.text = sourceText(source);
    if (this.labeled) {
      this.picker = el(doc, "select", "label-picker");
      for (const label of spec.properties.contents ?? []) {
        const option = el(doc, "option", "", label);
        option.value = label;
        this.picker.appendChild(option);
      }
      this.root.appendChild(this.picker);
    }
    this.textNode = el(doc, "div", "highlightable");
    this.renderText();
    this.root.appendChild(this.textNode);
    this.listNode = el(doc, "ul", "span-list");
    this.root.appendChild(this.listNode);
  }

  private renderText(): void {
    this.textNode.textContent = "";
    const doc = this.doc;
    const sorted = [...this.spans].sort((a, b) => a[0] - b[0]);
    let cursor = 0;
    for (const span of sorted) {
      const [start, end, label] = span as LabeledSpan;
      if (start > cursor) {
        this.textNode.appendChild(
          doc.createTextNode(this.text.slice(cursor, start)),
        );
      }
      const mark = el(doc, "mark", "span-mark", this.text.slice(start, end));
      if (label !== undefined) mark.dataset.label = String(label);
      this.textNode.appendChild(mark);
      cursor = end;
    }
    if (cursor < this.text.length) {
      this.textNode.appendChild(doc.createTextNode(this.text.slice(cursor)));
    }
  }

  private renderList(): void {
    this.listNode.textContent = "";
    this.spans.forEach((span, index) => {
      const item = el(this.doc, "li", "span-item");
      const [start, end, label] = span as LabeledSpan;
      item.appendChild(
        el(
          this.doc,
          "span",
          "span-desc",
          `${start}-${end}${label !== undefined ? ` ${label}` : ""}`,
        ),
      );
      const remove = el(this.doc, "button", "remove-span", "x");
      remove.addEventListener("click", () => {
        this.spans.splice(index, 1);
        this.markDirty();
        this.renderText();
        this.renderList();
      });
      item.appendChild(remove);
      this.listNode.appendChild(item);
    });
  }

  addSpan(start: number, end: number, label?: string): void {
    if (this.labeled) {
      const chosen = label ?? this.picker?.value ?? "";
      this.spans.push([start, end, chosen]);
    } else {
      this.spans.push([start, end]);
    }
    this.markDirty();
    this.renderText();
    this.renderList();
  }

  /** Capture the window selection inside the highlightable text. */
  captureSelection(win: Window): boolean {
    const selection = win.getSelection?.();
    if (!selection || selection.rangeCount === 0) return false;
    const range = selection.getRangeAt(0);
    const content = this.textNode.textContent ?? "";
    const start = content.indexOf(range.toString());
    if (start < 0 || range.toString().length === 0) return false;
    this.addSpan(start, start + range.toString().length);
    return true;
  }

  getValue(): ResultValue {
    return this.spans.map((s) => [...s]) as ResultValue;
  }

  setValue(value: ResultValue): void {
    this.spans = Array.isArray(value)
      ? (value.map((s) => [...(s as unknown as (number | string)[])]) as (
          | Span
          | LabeledSpan
        )[])
      : [];
    this.renderText();
    this.renderList();
  }
}

export function renderComponent(
  doc: Document,
  spec: ComponentSpec,
  question: string,
  source: SourcePayload,
): RenderedComponent {
  switch (spec.type) {
    case "text":
      return new TextComponent(doc, spec, question);
    case "table":
      return new TableComponent(doc, spec, question, source);
    case "textbox":
      return new TextboxComponent(doc, spec, question);
    case "button":
      return new ButtonComponent(doc, spec, question);
    case "slider":
      return new SliderComponent(doc, spec, question);
    case "selection":
    case "dropdown":
      return new SpanComponent(doc, spec, question, source);
  }
}

export function renderScreen(
  doc: Document,
  container: HTMLElement,
  format: ComponentSpec[],
  source: SourcePayload,
  questions: string[],
  suggestion: SuggestionEnvelope | null,
): RenderedScreen {
  container.textContent = "";
  const root = el(doc, "div", "annotation-screen");
  if (typeof source === "string") {
    root.appendChild(renderSourceBlock(doc, source));
  }
  const components: RenderedComponent[] = [];
  format.forEach((spec, index) => {
    let rendered: RenderedComponent;
    try {
      rendered = renderComponent(doc, spec, questions[index] ?? "", source);
    } catch (error) {
      // a broken component must not take down the rest of the screen
      const fallback = new TextComponent(doc, { type: "text", properties: {} }, "");
      fallback.root.classList.add("render-error");
      fallback.root.textContent = `component ${index} failed to render: ${error}`;
      rendered = fallback;
    }
    if (suggestion !== null) {
      (rendered as BaseComponent).installSuggestion?.(
        suggestion.results[index] ?? null,
      );
    }
    components.push(rendered);
    root.appendChild(rendered.root);
  });
  container.appendChild(root);
  return {
    root,
    components,
    getValues: () => components.map((c) => c.getValue()),
  };
}

export function acceptedUnchanged(
  screen: RenderedScreen,
  suggestion: SuggestionEnvelope | null,
): boolean {
  if (suggestion === null) return false;
  return screen.components.every((component, index) => {
    const suggested = suggestion.results[index];
    if (suggested === null) return true;
    return !component.dirty && resultsEqual(component.getValue(), suggested);
  });
}
