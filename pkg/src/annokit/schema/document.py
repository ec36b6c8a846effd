"""Task documents: parallel source/question/result/done arrays.

A task document is the unit of upload, annotation, and export. Instance i
holds one result entry per interface component; every result entry is encoded
on the wire as ``{"result": <value>}``.

Result values are plain Python data, interpreted per component kind:

* textbox  -> str
* button   -> int choice index (option labels accepted on input)
* selection, empty contents -> list of (start, end) character spans
* selection/dropdown with contents -> list of (start, end, label)
* slider   -> number within [min, max]
* text     -> ``NO_RESULT`` (display-only component)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Union

from .errors import ArityMismatch, IndexOutOfRange, InvalidResult, MalformedDocument
from .interface import ComponentSpec, InterfaceSpec

NO_RESULT = None

ResultValue = Union[str, int, float, list, None]


@dataclass(frozen=True)
class TablePayload:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def to_json_obj(self) -> dict[str, Any]:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}


SourcePayload = Union[str, TablePayload]


@dataclass(frozen=True)
class Violation:
    """One validation failure, locatable by instance and component index."""

    rule: str
    message: str
    instance: int | None = None
    component: int | None = None

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "rule": self.rule,
            "message": self.message,
            "instance": self.instance,
            "component": self.component,
        }


@dataclass(frozen=True)
class TaskDocument:
    """Parallel arrays; construction is permissive, `validate_task_document`
    reports invariant violations as data."""

    source: tuple[SourcePayload, ...]
    question: tuple[tuple[str, ...], ...]
    result: tuple[tuple[ResultValue, ...], ...]
    done: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.source)

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "source": [
                s.to_json_obj() if isinstance(s, TablePayload) else s for s in self.source
            ],
            "question": [list(qs) for qs in self.question],
            "result": [
                [{"result": _value_to_json(v)} for v in rs] for rs in self.result
            ],
            "done": list(self.done),
        }


def _value_to_json(v: ResultValue) -> Any:
    if isinstance(v, list):
        return [list(span) for span in v]
    return v


def _value_from_json(v: Any) -> ResultValue:
    if isinstance(v, list):
        return [tuple(span) if isinstance(span, list) else span for span in v]
    return v


def parse_task_document(document: str | dict) -> TaskDocument:
    """Parse a task document from JSON text or a parsed object.

    Accepts either a bare data object or a full task file with a ``data`` key.
    """
    if isinstance(document, str):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as e:
            raise MalformedDocument(f"invalid JSON: {e}") from e
    else:
        obj = document
    if isinstance(obj, dict) and "data" in obj:
        obj = obj["data"]
    if not isinstance(obj, dict):
        raise MalformedDocument("task document must be an object")
    missing = {"source", "question", "result", "done"} - set(obj)
    if missing:
        raise MalformedDocument(f"task document missing keys: {sorted(missing)}")
    for key in ("source", "question", "result", "done"):
        if not isinstance(obj[key], list):
            raise MalformedDocument(f"'{key}' must be an array")

    sources: list[SourcePayload] = []
    for i, s in enumerate(obj["source"]):
        if isinstance(s, str):
            sources.append(s)
        elif isinstance(s, dict) and "rows" in s:
            sources.append(
                TablePayload(
                    columns=tuple(s.get("columns", [])),
                    rows=tuple(tuple(str(c) for c in row) for row in s["rows"]),
                )
            )
        else:
            raise MalformedDocument(f"source[{i}] must be text or a table payload")

    questions = []
    for i, qs in enumerate(obj["question"]):
        if not isinstance(qs, list) or not all(isinstance(q, str) for q in qs):
            raise MalformedDocument(f"question[{i}] must be a list of strings")
        questions.append(tuple(qs))

    results = []
    for i, rs in enumerate(obj["result"]):
        if not isinstance(rs, list):
            raise MalformedDocument(f"result[{i}] must be a list")
        row = []
        for j, entry in enumerate(rs):
            if not isinstance(entry, dict) or set(entry) != {"result"}:
                raise MalformedDocument(
                    f"result[{i}][{j}] must be an object with a single 'result' key"
                )
            row.append(_value_from_json(entry["result"]))
        results.append(tuple(row))

    return TaskDocument(
        source=tuple(sources),
        question=tuple(questions),
        result=tuple(results),
        done=tuple(obj["done"]),
    )


def task_file_obj(doc: TaskDocument, spec: InterfaceSpec) -> dict[str, Any]:
    """Full task file in the upload/export wire shape."""
    return {"data": doc.to_json_obj(), "format": spec.to_json_obj()}


def task_file_json(doc: TaskDocument, spec: InterfaceSpec, indent: int | None = 4) -> str:
    return json.dumps(task_file_obj(doc, spec), indent=indent, ensure_ascii=False)


def empty_result_for(component: ComponentSpec) -> ResultValue:
    """The pristine result value a fresh document carries for a component."""
    kind = component.kind
    if kind == "textbox":
        return ""
    if kind == "button":
        return 0
    if kind in ("selection", "dropdown"):
        return []
    if kind == "slider":
        return component.properties["min"]
    # text and table are display-only
    return NO_RESULT


def new_document(
    spec: InterfaceSpec,
    sources: list[SourcePayload],
    questions: list[list[str]],
) -> TaskDocument:
    """Fresh document with pristine results and all done flags cleared."""
    empties = tuple(empty_result_for(c) for c in spec.components)
    return TaskDocument(
        source=tuple(sources),
        question=tuple(tuple(qs) for qs in questions),
        result=tuple(tuple(list(e) if isinstance(e, list) else e for e in empties)
                     for _ in sources),
        done=tuple(0 for _ in sources),
    )


def _check_result(
    component: ComponentSpec, value: ResultValue, source: SourcePayload
) -> str | None:
    """Return an error message when value violates the component's invariants."""
    kind = component.kind
    if kind in ("text", "table"):
        if value is not NO_RESULT:
            return f"{kind} components carry no result"
        return None
    if kind == "textbox":
        return None if isinstance(value, str) else "textbox result must be text"
    if kind == "button":
        contents = component.contents
        if isinstance(value, bool):
            return "button result must be an index or option label"
        if isinstance(value, int):
            return None if 0 <= value < len(contents) else (
                f"choice index {value} out of range [0, {len(contents)})"
            )
        if isinstance(value, str):
            return None if value in contents else f"choice label {value!r} not in contents"
        return "button result must be an index or option label"
    if kind == "slider":
        lo, hi = component.properties["min"], component.properties["max"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return "slider result must be a number"
        return None if lo <= value <= hi else f"score {value} outside [{lo}, {hi}]"
    # span components
    labeled = component.kind == "dropdown" or bool(component.contents)
    if not isinstance(value, list):
        return "span result must be a list of spans"
    if isinstance(source, TablePayload):
        if value:
            return "span annotations require a text source"
        return None
    text_len = len(source)
    seen: list[tuple[int, int]] = []
    for span in value:
        if labeled:
            if not (isinstance(span, tuple) and len(span) == 3):
                return "labeled span must be (start, end, label)"
            start, end, label = span
            if label not in component.contents:
                return f"span label {label!r} not in contents"
        else:
            if not (isinstance(span, tuple) and len(span) == 2):
                return "span must be (start, end)"
            start, end = span
        if not (isinstance(start, int) and isinstance(end, int)):
            return "span offsets must be integers"
        if not (0 <= start < end <= text_len):
            return f"span ({start}, {end}) outside [0, {text_len}]"
        for s0, e0 in seen:
            if start < e0 and s0 < end:
                return f"span ({start}, {end}) overlaps ({s0}, {e0})"
        seen.append((start, end))
    return None


def normalize_result(component: ComponentSpec, value: ResultValue) -> ResultValue:
    """Canonical storage form: choice labels become indices, spans become tuples."""
    if component.kind == "button" and isinstance(value, str):
        return component.contents.index(value)
    if isinstance(value, list):
        return [tuple(span) if isinstance(span, list) else span for span in value]
    return value


def validate_task_document(doc: TaskDocument, spec: InterfaceSpec) -> list[Violation]:
    """All invariant violations of doc against spec; empty when valid."""
    violations: list[Violation] = []
    n = len(doc.source)
    for name, arr in (("question", doc.question), ("result", doc.result), ("done", doc.done)):
        if len(arr) != n:
            violations.append(
                Violation(
                    rule="length_mismatch",
                    message=f"len({name})={len(arr)} != len(source)={n}",
                )
            )
    for i, flag in enumerate(doc.done):
        if flag not in (0, 1):
            violations.append(
                Violation(rule="invalid_done_flag", message=f"done[{i}]={flag!r}", instance=i)
            )
    n_components = len(spec)
    for i in range(min(n, len(doc.question), len(doc.result))):
        if len(doc.question[i]) != n_components:
            violations.append(
                Violation(
                    rule="arity_mismatch",
                    message=f"question[{i}] has {len(doc.question[i])} entries for "
                    f"{n_components} components",
                    instance=i,
                )
            )
        if len(doc.result[i]) != n_components:
            violations.append(
                Violation(
                    rule="arity_mismatch",
                    message=f"result[{i}] has {len(doc.result[i])} entries for "
                    f"{n_components} components",
                    instance=i,
                )
            )
            continue
        for j, component in enumerate(spec.components):
            err = _check_result(component, doc.result[i][j], doc.source[i])
            if err is not None:
                violations.append(
                    Violation(rule="invalid_result", message=err, instance=i, component=j)
                )
    return violations


def merge_annotation(
    doc: TaskDocument, instance: int, results: list[ResultValue], spec: InterfaceSpec
) -> TaskDocument:
    """New document with results installed at `instance` and its done flag set."""
    if not 0 <= instance < len(doc.source):
        raise IndexOutOfRange(f"instance {instance} out of range [0, {len(doc.source)})")
    if len(results) != len(spec):
        raise ArityMismatch(
            f"got {len(results)} results for {len(spec)} components"
        )
    normalized = []
    for j, (component, value) in enumerate(zip(spec.components, results)):
        value = normalize_result(component, value)
        err = _check_result(component, value, doc.source[instance])
        if err is not None:
            raise InvalidResult(err, component=j)
        normalized.append(value)
    new_result = tuple(
        tuple(normalized) if i == instance else row for i, row in enumerate(doc.result)
    )
    new_done = tuple(1 if i == instance else d for i, d in enumerate(doc.done))
    return TaskDocument(
        source=doc.source, question=doc.question, result=new_result, done=new_done
    )
