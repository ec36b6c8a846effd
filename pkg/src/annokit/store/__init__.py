"""Durable storage: users, tasks, leases, annotation records, export."""

from .errors import (
    LeaseConflict,
    NotAssigned,
    PermissionDenied,
    RoleMismatch,
    StoreError,
    UnknownTask,
    UnknownUser,
    ValidationFailed,
)
from .store import (
    DEFAULT_LEASE_TIMEOUT_S,
    POLICY_EXCLUSIVE,
    POLICY_SHARED,
    ROLE_ADMIN,
    ROLE_ANNOTATOR,
    AnnotationStore,
    ServedInstance,
    TaskInfo,
    User,
)

__all__ = [
    "AnnotationStore",
    "ServedInstance",
    "TaskInfo",
    "User",
    "ROLE_ADMIN",
    "ROLE_ANNOTATOR",
    "POLICY_EXCLUSIVE",
    "POLICY_SHARED",
    "DEFAULT_LEASE_TIMEOUT_S",
    "StoreError",
    "PermissionDenied",
    "ValidationFailed",
    "UnknownTask",
    "UnknownUser",
    "RoleMismatch",
    "NotAssigned",
    "LeaseConflict",
]
