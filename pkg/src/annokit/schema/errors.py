"""Exception taxonomy for interface specs and task documents."""


class SchemaError(ValueError):
    """Base class for interface-spec and task-document failures."""


class MalformedDocument(SchemaError):
    """The input is not well-formed JSON or lacks the required top-level keys."""


class UnknownComponentKind(SchemaError):
    def __init__(self, kind: str, index: int):
        super().__init__(f"component {index}: unknown kind {kind!r}")
        self.kind = kind
        self.index = index


class InvalidProperties(SchemaError):
    def __init__(self, message: str, index: int | None = None):
        where = f"component {index}: " if index is not None else ""
        super().__init__(where + message)
        self.index = index


class IndexOutOfRange(SchemaError):
    pass


class ArityMismatch(SchemaError):
    pass


class InvalidResult(SchemaError):
    def __init__(self, message: str, component: int | None = None):
        where = f"component {component}: " if component is not None else ""
        super().__init__(where + message)
        self.component = component
