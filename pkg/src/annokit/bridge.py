"""Mapping between task-document results and model task labels.

A task's backend_config carries a ``task_map`` binding interface components
to model tasks: span components (selection/dropdown) become BIO sequence
tasks over whitespace tokens with character-offset spans; button components
become classification tasks over their option labels.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Optional

from .engine.model import CLASSIFICATION, SEQUENCE, Instance
from .schema import InterfaceSpec
from .sim.metrics import bio_spans

UNLABELED_SPAN_TYPE = "SPAN"

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class TaskBinding:
    component: int
    task_id: str
    kind: str  # SEQUENCE or CLASSIFICATION
    labels: tuple[str, ...]

    @property
    def label_set(self) -> tuple[str, ...]:
        """The model head's label set (BIO-expanded for sequence tasks)."""
        if self.kind == CLASSIFICATION:
            return self.labels
        types = self.labels or (UNLABELED_SPAN_TYPE,)
        out: list[str] = []
        for t in types:
            out += [f"B-{t}", f"I-{t}"]
        return tuple(out) + ("O",)


def bindings_from_config(
    backend_config: dict[str, Any], spec: InterfaceSpec
) -> list[TaskBinding]:
    """Validated TaskBindings from a backend_config's task_map."""
    out = []
    for entry in backend_config.get("task_map", []):
        j = entry["component"]
        if not 0 <= j < len(spec):
            raise ValueError(f"task_map component {j} out of range")
        component = spec.components[j]
        if component.kind == "button":
            kind = CLASSIFICATION
            labels = tuple(entry.get("labels") or component.contents)
        elif component.kind in ("selection", "dropdown"):
            kind = SEQUENCE
            labels = tuple(entry.get("labels") or component.contents)
        else:
            raise ValueError(
                f"component {j} ({component.kind}) cannot back a model task"
            )
        out.append(
            TaskBinding(
                component=j,
                task_id=entry.get("task_id", f"component{j}"),
                kind=kind,
                labels=labels,
            )
        )
    if len({b.task_id for b in out}) != len(out):
        raise ValueError("task_map task ids must be unique")
    return out


def model_tasks(bindings: list[TaskBinding]) -> dict[str, tuple[tuple[str, ...], str]]:
    return {b.task_id: (b.label_set, b.kind) for b in bindings}


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in _TOKEN.finditer(text)]


def instance_from_source(instance_id, source: str) -> Optional[Instance]:
    """Engine instance over whitespace tokens; None for non-text payloads."""
    if not isinstance(source, str):
        return None
    tokens = tuple(t for t, _, _ in tokenize_with_offsets(source))
    if not tokens:
        return None
    return Instance(instance_id, tokens)


def spans_to_tags(
    offsets: list[tuple[str, int, int]], spans: list, labeled: bool
) -> tuple[str, ...]:
    """Character spans -> BIO over tokens (a token overlapping a span joins it)."""
    tags = ["O"] * len(offsets)
    for span in sorted(spans, key=lambda s: s[0]):
        if labeled:
            start, end, label = span
        else:
            start, end = span
            label = UNLABELED_SPAN_TYPE
        first = True
        for i, (_, ts, te) in enumerate(offsets):
            if ts < end and start < te:
                tags[i] = ("B-" if first else "I-") + label
                first = False
    return tuple(tags)


def tags_to_spans(
    offsets: list[tuple[str, int, int]], tags, labeled: bool
) -> list:
    """BIO over tokens -> character spans (labeled triples or plain pairs)."""
    out = []
    for i, j, typ in bio_spans(list(tags)):
        start = offsets[i][1]
        end = offsets[j - 1][2]
        out.append((start, end, typ) if labeled else (start, end))
    return out


def gold_labels_for(
    binding: TaskBinding, spec: InterfaceSpec, source, results_row: list
):
    """Model gold labels from one instance's submitted results; None if absent."""
    value = results_row[binding.component]
    if binding.kind == CLASSIFICATION:
        if not isinstance(value, int):
            return None
        return binding.labels[value]
    if not isinstance(source, str):
        return None
    component = spec.components[binding.component]
    labeled = component.kind == "dropdown" or bool(component.contents)
    offsets = tokenize_with_offsets(source)
    if not offsets:
        return None
    return spans_to_tags(offsets, value if isinstance(value, list) else [], labeled)


def results_from_predictions(
    bindings: list[TaskBinding],
    spec: InterfaceSpec,
    source,
    predictions: dict[str, tuple],
) -> list:
    """Per-component suggested ResultValues (None where no task is bound)."""
    out: list = [None] * len(spec)
    if not isinstance(source, str):
        return out
    offsets = tokenize_with_offsets(source)
    for binding in bindings:
        if binding.task_id not in predictions:
            continue
        labels, _conf = predictions[binding.task_id]
        if binding.kind == CLASSIFICATION:
            out[binding.component] = binding.labels.index(labels)
        else:
            component = spec.components[binding.component]
            labeled = component.kind == "dropdown" or bool(component.contents)
            out[binding.component] = [
                list(span) for span in tags_to_spans(offsets, labels, labeled)
            ]
    return out
