"""SQLite-backed store for users, tasks, leases, and annotation records.

Implements the four-step workflow: the administrator uploads a task document
and assigns annotators; annotators are served undone instances under a lease;
submissions merge into the document and append immutable records; exports
reproduce the upload wire shape plus a records section.

All mutations run inside one transaction under a process-wide lock (desk
scale: many readers, serialized writers). Timestamps are UTC milliseconds.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..schema import (
    InterfaceSpec,
    SchemaError,
    TaskDocument,
    Violation,
    merge_annotation,
    parse_interface_spec,
    parse_task_document,
    task_file_obj,
    validate_task_document,
)
from .errors import (
    LeaseConflict,
    NotAssigned,
    PermissionDenied,
    RoleMismatch,
    UnknownTask,
    UnknownUser,
    ValidationFailed,
)

ROLE_ADMIN = "administrator"
ROLE_ANNOTATOR = "annotator"

POLICY_EXCLUSIVE = "exclusive"  # one annotation per instance
POLICY_SHARED = "shared"  # every assignee annotates every instance

DEFAULT_LEASE_TIMEOUT_S = 30 * 60

_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    name TEXT UNIQUE NOT NULL,
    role TEXT NOT NULL,
    demographics TEXT NOT NULL DEFAULT '{}',
    secret TEXT NOT NULL DEFAULT ''
);
CREATE TABLE IF NOT EXISTS tasks (
    task_id TEXT PRIMARY KEY,
    interface TEXT NOT NULL,
    document TEXT NOT NULL,
    backend TEXT NOT NULL DEFAULT 'none',
    backend_config TEXT NOT NULL DEFAULT '{}',
    policy TEXT NOT NULL DEFAULT 'exclusive',
    created_by TEXT NOT NULL,
    created_at_ms INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS assignees (
    task_id TEXT NOT NULL,
    user_id TEXT NOT NULL,
    PRIMARY KEY (task_id, user_id)
);
CREATE TABLE IF NOT EXISTS leases (
    task_id TEXT NOT NULL,
    instance_index INTEGER NOT NULL,
    annotator_id TEXT NOT NULL,
    served_at_ms INTEGER NOT NULL,
    expires_at_ms INTEGER NOT NULL,
    PRIMARY KEY (task_id, instance_index, annotator_id)
);
CREATE TABLE IF NOT EXISTS records (
    record_id INTEGER PRIMARY KEY AUTOINCREMENT,
    task_id TEXT NOT NULL,
    instance_index INTEGER NOT NULL,
    annotator_id TEXT NOT NULL,
    results TEXT NOT NULL,
    suggestion_shown TEXT,
    accepted_unchanged INTEGER NOT NULL DEFAULT 0,
    served_at_ms INTEGER,
    submitted_at_ms INTEGER NOT NULL,
    duration_ms INTEGER,
    idempotency_key TEXT
);
CREATE INDEX IF NOT EXISTS idx_records_task ON records (task_id, instance_index);
"""


@dataclass(frozen=True)
class User:
    user_id: str
    name: str
    role: str
    demographics: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class TaskInfo:
    task_id: str
    interface: InterfaceSpec
    document: TaskDocument
    backend: str
    backend_config: dict[str, Any]
    policy: str
    assignees: frozenset[str]
    created_by: str


@dataclass(frozen=True)
class ServedInstance:
    instance_index: int
    source: Any
    questions: tuple[str, ...]
    served_at_ms: int
    suggestion: Optional[dict] = None


def _results_to_json(results) -> str:
    return json.dumps(
        [[list(s) for s in v] if isinstance(v, list) else v for v in results],
        ensure_ascii=False,
    )


def _results_from_json(text: str):
    data = json.loads(text)
    return [
        [tuple(s) if isinstance(s, list) else s for s in v] if isinstance(v, list) else v
        for v in data
    ]


class AnnotationStore:
    """Durable task/annotation state with lease-based serving."""

    def __init__(
        self,
        path: str = ":memory:",
        lease_timeout_s: float = DEFAULT_LEASE_TIMEOUT_S,
        clock: Callable[[], float] = time.time,
    ):
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._conn.executescript(_SCHEMA)
        self._conn.commit()
        self._lock = threading.RLock()
        self.lease_timeout_s = lease_timeout_s
        self.clock = clock
        # suggestion provider: (TaskInfo, instance_index, annotator_id) -> dict | None
        self.suggestion_provider: Optional[Callable] = None
        # submit listeners: (TaskInfo, instance_index, results, annotator_id) -> None
        self.submit_listeners: list[Callable] = []

    def close(self) -> None:
        self._conn.close()

    def _now_ms(self) -> int:
        return int(self.clock() * 1000)

    # ---------------------------------------------------------------- users

    def create_user(
        self,
        name: str,
        role: str,
        demographics: dict | None = None,
        secret: str = "",
        user_id: str | None = None,
    ) -> User:
        if role not in (ROLE_ADMIN, ROLE_ANNOTATOR):
            raise RoleMismatch(f"unknown role {role!r}")
        user_id = user_id or uuid.uuid4().hex[:12]
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO users (user_id, name, role, demographics, secret) "
                "VALUES (?, ?, ?, ?, ?)",
                (user_id, name, role, json.dumps(demographics or {}), secret),
            )
        return User(user_id, name, role, demographics or {})

    def get_user(self, user_id: str) -> User:
        row = self._conn.execute(
            "SELECT user_id, name, role, demographics FROM users WHERE user_id = ?",
            (user_id,),
        ).fetchone()
        if row is None:
            raise UnknownUser(f"no user {user_id!r}")
        return User(row[0], row[1], row[2], json.loads(row[3]))

    def find_user(self, name: str, secret: str | None = None) -> User:
        row = self._conn.execute(
            "SELECT user_id, name, role, demographics, secret FROM users WHERE name = ?",
            (name,),
        ).fetchone()
        if row is None or (secret is not None and row[4] != secret):
            raise UnknownUser(f"no user named {name!r}")
        return User(row[0], row[1], row[2], json.loads(row[3]))

    def list_users(self) -> list[User]:
        rows = self._conn.execute(
            "SELECT user_id, name, role, demographics FROM users ORDER BY name"
        ).fetchall()
        return [User(r[0], r[1], r[2], json.loads(r[3])) for r in rows]

    # ---------------------------------------------------------------- tasks

    def create_task(
        self,
        admin_id: str,
        spec: InterfaceSpec,
        doc: TaskDocument,
        backend: str = "none",
        backend_config: dict | None = None,
        policy: str = POLICY_EXCLUSIVE,
    ) -> str:
        admin = self.get_user(admin_id)
        if admin.role != ROLE_ADMIN:
            raise PermissionDenied("only administrators create tasks")
        violations = validate_task_document(doc, spec)
        if violations:
            raise ValidationFailed(violations)
        if policy not in (POLICY_EXCLUSIVE, POLICY_SHARED):
            raise ValueError(f"unknown policy {policy!r}")
        task_id = uuid.uuid4().hex[:12]
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO tasks (task_id, interface, document, backend, "
                "backend_config, policy, created_by, created_at_ms) "
                "VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    task_id,
                    json.dumps({"format": spec.to_json_obj()}, ensure_ascii=False),
                    json.dumps(doc.to_json_obj(), ensure_ascii=False),
                    backend,
                    json.dumps(backend_config or {}, ensure_ascii=False),
                    policy,
                    admin_id,
                    self._now_ms(),
                ),
            )
        return task_id

    def get_task(self, task_id: str) -> TaskInfo:
        row = self._conn.execute(
            "SELECT interface, document, backend, backend_config, policy, created_by "
            "FROM tasks WHERE task_id = ?",
            (task_id,),
        ).fetchone()
        if row is None:
            raise UnknownTask(f"no task {task_id!r}")
        assignees = frozenset(
            r[0]
            for r in self._conn.execute(
                "SELECT user_id FROM assignees WHERE task_id = ?", (task_id,)
            )
        )
        return TaskInfo(
            task_id=task_id,
            interface=parse_interface_spec(row[0]),
            document=parse_task_document(row[1]),
            backend=row[2],
            backend_config=json.loads(row[3]),
            policy=row[4],
            assignees=assignees,
            created_by=row[5],
        )

    def list_tasks(self, user_id: str | None = None) -> list[str]:
        if user_id is None:
            rows = self._conn.execute("SELECT task_id FROM tasks ORDER BY created_at_ms")
            return [r[0] for r in rows]
        user = self.get_user(user_id)
        if user.role == ROLE_ADMIN:
            return self.list_tasks()
        rows = self._conn.execute(
            "SELECT t.task_id FROM tasks t JOIN assignees a ON a.task_id = t.task_id "
            "WHERE a.user_id = ? ORDER BY t.created_at_ms",
            (user_id,),
        )
        return [r[0] for r in rows]

    def assign(self, task_id: str, annotator_id: str) -> None:
        self.get_task(task_id)
        user = self.get_user(annotator_id)
        if user.role != ROLE_ANNOTATOR:
            raise RoleMismatch(f"{user.name!r} is not an annotator")
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR IGNORE INTO assignees (task_id, user_id) VALUES (?, ?)",
                (task_id, annotator_id),
            )

    # --------------------------------------------------------------- serving

    def _annotated_by(self, task_id: str, annotator_id: str) -> set[int]:
        rows = self._conn.execute(
            "SELECT DISTINCT instance_index FROM records "
            "WHERE task_id = ? AND annotator_id = ?",
            (task_id, annotator_id),
        )
        return {r[0] for r in rows}

    def next_instance(
        self, task_id: str, annotator_id: str, with_suggestion: bool = True
    ) -> Optional[ServedInstance]:
        """Serve the lowest-index open instance and lease it to the caller."""
        task = self.get_task(task_id)
        if annotator_id not in task.assignees:
            raise NotAssigned(f"user {annotator_id!r} is not assigned to {task_id!r}")
        now = self._now_ms()
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM leases WHERE expires_at_ms <= ?", (now,))
            if task.policy == POLICY_SHARED:
                skip = self._annotated_by(task_id, annotator_id)
            else:
                skip = {i for i, d in enumerate(task.document.done) if d}
                others = self._conn.execute(
                    "SELECT instance_index FROM leases "
                    "WHERE task_id = ? AND annotator_id != ?",
                    (task_id, annotator_id),
                )
                skip |= {r[0] for r in others}
            index = next(
                (i for i in range(len(task.document)) if i not in skip), None
            )
            if index is None:
                return None
            expires = now + int(self.lease_timeout_s * 1000)
            self._conn.execute(
                "INSERT OR REPLACE INTO leases "
                "(task_id, instance_index, annotator_id, served_at_ms, expires_at_ms) "
                "VALUES (?, ?, ?, ?, ?)",
                (task_id, index, annotator_id, now, expires),
            )
        suggestion = None
        if with_suggestion and self.suggestion_provider is not None:
            suggestion = self.suggestion_provider(task, index, annotator_id)
        return ServedInstance(
            instance_index=index,
            source=task.document.source[index],
            questions=task.document.question[index],
            served_at_ms=now,
            suggestion=suggestion,
        )

    # ------------------------------------------------------------ submission

    def submit_annotation(
        self,
        task_id: str,
        annotator_id: str,
        instance_index: int,
        results: list,
        suggestion_shown: list | None = None,
        accepted_unchanged: bool = False,
        idempotency_key: str | None = None,
        allow_resubmit: bool = False,
    ) -> int:
        """Persist one annotation; returns the record id."""
        task = self.get_task(task_id)
        self.get_user(annotator_id)
        if annotator_id not in task.assignees and not allow_resubmit:
            raise NotAssigned(f"user {annotator_id!r} is not assigned to {task_id!r}")
        if idempotency_key is not None:
            row = self._conn.execute(
                "SELECT record_id FROM records WHERE task_id = ? AND idempotency_key = ?",
                (task_id, idempotency_key),
            ).fetchone()
            if row is not None:
                return row[0]
        now = self._now_ms()
        with self._lock, self._conn:
            lease = self._conn.execute(
                "SELECT annotator_id, served_at_ms, expires_at_ms FROM leases "
                "WHERE task_id = ? AND instance_index = ? AND annotator_id = ?",
                (task_id, instance_index, annotator_id),
            ).fetchone()
            served_at = lease[1] if lease is not None and lease[2] > now else None
            if served_at is None:
                # lease missing or expired: acceptable only while the instance
                # is still open for this caller
                if task.policy == POLICY_SHARED:
                    open_for_caller = (
                        instance_index not in self._annotated_by(task_id, annotator_id)
                    )
                else:
                    done = (
                        0 <= instance_index < len(task.document)
                        and task.document.done[instance_index] == 1
                    )
                    other = self._conn.execute(
                        "SELECT 1 FROM leases WHERE task_id = ? AND instance_index = ? "
                        "AND annotator_id != ? AND expires_at_ms > ?",
                        (task_id, instance_index, annotator_id, now),
                    ).fetchone()
                    open_for_caller = not done and other is None
                if not open_for_caller and not allow_resubmit:
                    raise LeaseConflict(
                        f"instance {instance_index} of {task_id!r} is not open "
                        f"for {annotator_id!r}"
                    )
            try:
                merged = merge_annotation(
                    task.document, instance_index, list(results), task.interface
                )
            except SchemaError as e:
                raise ValidationFailed(
                    [Violation(rule=type(e).__name__, message=str(e),
                               instance=instance_index)]
                ) from e
            self._conn.execute(
                "UPDATE tasks SET document = ? WHERE task_id = ?",
                (json.dumps(merged.to_json_obj(), ensure_ascii=False), task_id),
            )
            stored = merged.result[instance_index]
            cursor = self._conn.execute(
                "INSERT INTO records (task_id, instance_index, annotator_id, results, "
                "suggestion_shown, accepted_unchanged, served_at_ms, submitted_at_ms, "
                "duration_ms, idempotency_key) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    task_id,
                    instance_index,
                    annotator_id,
                    _results_to_json(stored),
                    None if suggestion_shown is None else _results_to_json(suggestion_shown),
                    int(accepted_unchanged),
                    served_at,
                    now,
                    None if served_at is None else now - served_at,
                    idempotency_key,
                ),
            )
            self._conn.execute(
                "DELETE FROM leases WHERE task_id = ? AND instance_index = ? "
                "AND annotator_id = ?",
                (task_id, instance_index, annotator_id),
            )
            record_id = cursor.lastrowid
        task_after = self.get_task(task_id)
        for listener in self.submit_listeners:
            listener(task_after, instance_index, list(stored), annotator_id)
        return record_id

    # ------------------------------------------------------------- querying

    def latest_records(self, task_id: str) -> list[dict]:
        """Latest record per (instance, annotator), oldest first."""
        self.get_task(task_id)
        rows = self._conn.execute(
            "SELECT record_id, instance_index, annotator_id, results, suggestion_shown, "
            "accepted_unchanged, served_at_ms, submitted_at_ms, duration_ms "
            "FROM records WHERE task_id = ? ORDER BY record_id",
            (task_id,),
        ).fetchall()
        latest: dict[tuple, dict] = {}
        for r in rows:
            latest[(r[1], r[2])] = {
                "record_id": r[0],
                "instance_index": r[1],
                "annotator_id": r[2],
                "results": _results_from_json(r[3]),
                "suggestion_shown": None if r[4] is None else _results_from_json(r[4]),
                "accepted_unchanged": bool(r[5]),
                "served_at_ms": r[6],
                "submitted_at_ms": r[7],
                "duration_ms": r[8],
            }
        return sorted(latest.values(), key=lambda d: d["record_id"])

    def all_records(self, task_id: str) -> list[dict]:
        self.get_task(task_id)
        rows = self._conn.execute(
            "SELECT record_id, instance_index, annotator_id, results, submitted_at_ms "
            "FROM records WHERE task_id = ? ORDER BY record_id",
            (task_id,),
        ).fetchall()
        return [
            {
                "record_id": r[0],
                "instance_index": r[1],
                "annotator_id": r[2],
                "results": _results_from_json(r[3]),
                "submitted_at_ms": r[4],
            }
            for r in rows
        ]

    # --------------------------------------------------------------- export

    def export(self, task_id: str) -> dict:
        """Document in the upload wire shape; a records section when nonempty."""
        task = self.get_task(task_id)
        out = task_file_obj(task.document, task.interface)
        records = self.latest_records(task_id)
        if records:
            out["records"] = [
                {
                    "instance_index": r["instance_index"],
                    "annotator_id": r["annotator_id"],
                    "results": [
                        [list(s) for s in v] if isinstance(v, list) else v
                        for v in r["results"]
                    ],
                    "submitted_at_ms": r["submitted_at_ms"],
                    "duration_ms": r["duration_ms"],
                    "accepted_unchanged": r["accepted_unchanged"],
                }
                for r in records
            ]
        return out

    def export_records_ndjson(self, task_id: str) -> str:
        """One full AnnotationRecord per line."""
        lines = []
        for r in self.latest_records(task_id):
            obj = dict(r)
            obj["results"] = [
                [list(s) for s in v] if isinstance(v, list) else v for v in obj["results"]
            ]
            if obj["suggestion_shown"] is not None:
                obj["suggestion_shown"] = [
                    [list(s) for s in v] if isinstance(v, list) else v
                    for v in obj["suggestion_shown"]
                ]
            lines.append(json.dumps(obj, ensure_ascii=False))
        return "\n".join(lines) + ("\n" if lines else "")
