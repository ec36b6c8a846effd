"""Interface specs and task documents (the declarative annotation data model)."""

from .document import (
    NO_RESULT,
    ResultValue,
    SourcePayload,
    TablePayload,
    TaskDocument,
    Violation,
    empty_result_for,
    merge_annotation,
    new_document,
    normalize_result,
    parse_task_document,
    task_file_json,
    task_file_obj,
    validate_task_document,
)
from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    InvalidProperties,
    InvalidResult,
    MalformedDocument,
    SchemaError,
    UnknownComponentKind,
)
from .interface import (
    COMPONENT_KINDS,
    ComponentSpec,
    InterfaceSpec,
    parse_interface_spec,
)

__all__ = [
    "COMPONENT_KINDS",
    "ComponentSpec",
    "InterfaceSpec",
    "parse_interface_spec",
    "NO_RESULT",
    "ResultValue",
    "SourcePayload",
    "TablePayload",
    "TaskDocument",
    "Violation",
    "empty_result_for",
    "merge_annotation",
    "new_document",
    "normalize_result",
    "parse_task_document",
    "task_file_json",
    "task_file_obj",
    "validate_task_document",
    "SchemaError",
    "MalformedDocument",
    "UnknownComponentKind",
    "InvalidProperties",
    "InvalidResult",
    "ArityMismatch",
    "IndexOutOfRange",
]
