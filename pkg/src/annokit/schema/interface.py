"""Declarative interface specs: an ordered list of annotation components.

The wire shape is a JSON object with a ``format`` array; each entry carries a
``type`` and a ``properties`` object whose keys depend on the type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import InvalidProperties, MalformedDocument, UnknownComponentKind

COMPONENT_KINDS = ("text", "textbox", "button", "selection", "dropdown", "slider", "table")

# per-kind allowed property keys; unknown keys are rejected
_ALLOWED_PROPS = {
    "text": frozenset(),
    "textbox": frozenset(),
    "button": frozenset({"contents"}),
    "selection": frozenset({"contents"}),
    "dropdown": frozenset({"contents"}),
    "slider": frozenset({"min", "max", "step"}),
    "table": frozenset({"columns"}),
}


@dataclass(frozen=True)
class ComponentSpec:
    """One annotation component: its kind plus kind-specific properties."""

    kind: str
    properties: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in COMPONENT_KINDS:
            raise UnknownComponentKind(self.kind, -1)
        _validate_properties(self.kind, self.properties, index=None)

    @property
    def contents(self) -> list[str]:
        return list(self.properties.get("contents", []))

    @property
    def has_labels(self) -> bool:
        """True when this component attaches labels to spans or choices."""
        return self.kind in ("button", "dropdown") or (
            self.kind == "selection" and bool(self.properties.get("contents"))
        )

    def to_json_obj(self) -> dict[str, Any]:
        return {"type": self.kind, "properties": dict(self.properties)}


@dataclass(frozen=True)
class InterfaceSpec:
    """Ordered component list; components render top-to-bottom."""

    components: tuple[ComponentSpec, ...]

    def __post_init__(self):
        if not self.components:
            raise InvalidProperties("format array must contain at least one component")

    def __len__(self) -> int:
        return len(self.components)

    def to_json_obj(self) -> list[dict[str, Any]]:
        return [c.to_json_obj() for c in self.components]

    def to_json(self, indent: int | None = 4) -> str:
        return json.dumps({"format": self.to_json_obj()}, indent=indent, ensure_ascii=False)


def _validate_properties(kind: str, props: dict[str, Any], index: int | None) -> None:
    if not isinstance(props, dict):
        raise InvalidProperties("properties must be an object", index)
    unknown = set(props) - _ALLOWED_PROPS[kind]
    if unknown:
        raise InvalidProperties(
            f"unknown property keys for {kind}: {sorted(unknown)}", index
        )
    if kind in ("button", "dropdown"):
        contents = props.get("contents")
        if not isinstance(contents, list) or not contents:
            raise InvalidProperties(f"{kind} requires non-empty contents", index)
        if not all(isinstance(c, str) for c in contents):
            raise InvalidProperties(f"{kind} contents must be strings", index)
    elif kind == "selection":
        contents = props.get("contents")
        if contents is None or not isinstance(contents, list):
            raise InvalidProperties("selection requires a contents list (may be empty)", index)
        if not all(isinstance(c, str) for c in contents):
            raise InvalidProperties("selection contents must be strings", index)
    elif kind == "slider":
        missing = {"min", "max", "step"} - set(props)
        if missing:
            raise InvalidProperties(f"slider requires min/max/step, missing {sorted(missing)}", index)
        lo, hi, step = props["min"], props["max"], props["step"]
        for name, v in (("min", lo), ("max", hi), ("step", step)):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise InvalidProperties(f"slider {name} must be a number", index)
        if not lo < hi:
            raise InvalidProperties("slider requires min < max", index)
        if not step > 0:
            raise InvalidProperties("slider requires step > 0", index)
    elif kind == "table":
        columns = props.get("columns")
        if columns is not None and (
            not isinstance(columns, list) or not all(isinstance(c, str) for c in columns)
        ):
            raise InvalidProperties("table columns must be a list of strings", index)


def component_from_json(obj: Any, index: int) -> ComponentSpec:
    if not isinstance(obj, dict):
        raise InvalidProperties("component must be an object", index)
    kind = obj.get("type")
    if not isinstance(kind, str) or kind not in COMPONENT_KINDS:
        raise UnknownComponentKind(str(kind), index)
    props = obj.get("properties", {})
    _validate_properties(kind, props if isinstance(props, dict) else props, index)
    return ComponentSpec(kind=kind, properties=dict(props))


def parse_interface_spec(document: str | dict) -> InterfaceSpec:
    """Parse and validate an interface spec from JSON text or a parsed object.

    Accepts either a bare ``{"format": [...]}`` object or a full task file
    that carries a ``format`` array next to its ``data``.
    """
    if isinstance(document, str):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as e:
            raise MalformedDocument(f"invalid JSON: {e}") from e
    else:
        obj = document
    if not isinstance(obj, dict) or "format" not in obj:
        raise MalformedDocument("missing top-level 'format' array")
    fmt = obj["format"]
    if not isinstance(fmt, list):
        raise MalformedDocument("'format' must be an array")
    if not fmt:
        raise InvalidProperties("format array must contain at least one component")
    return InterfaceSpec(tuple(component_from_json(c, i) for i, c in enumerate(fmt)))
