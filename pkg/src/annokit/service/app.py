"""HTTP surface for the annotation workflow.

JSON REST: registration/login, task creation and assignment, lease-based
instance serving with suggestion envelopes, submission, export. Errors use a
problem-details style body: {"code", "message", "details"}.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .. import __version__
from ..engine.kernels import BACKEND as KERNEL_BACKEND
from ..schema import (
    SchemaError,
    parse_interface_spec,
    parse_task_document,
    validate_task_document,
)
from ..store import (
    AnnotationStore,
    LeaseConflict,
    NotAssigned,
    PermissionDenied,
    ROLE_ADMIN,
    RoleMismatch,
    StoreError,
    UnknownTask,
    UnknownUser,
    ValidationFailed,
)
from .backends import BackendManager
from .sessions import SessionManager


class ApiProblem(Exception):
    def __init__(self, status: int, code: str, message: str, details: Any = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details


class RegisterBody(BaseModel):
    name: str
    password: str
    role: str
    demographics: dict[str, Any] = {}


class LoginBody(BaseModel):
    name: str
    password: str


class CreateTaskBody(BaseModel):
    data: dict[str, Any]
    format: list[dict[str, Any]]
    backend: str = "none"
    backend_config: dict[str, Any] = {}
    policy: str = "exclusive"


class AssignBody(BaseModel):
    annotator: str  # user name or id


class SubmitBody(BaseModel):
    instance_index: int
    results: list[Any]
    accepted_unchanged: bool = False
    suggestion_shown: Optional[list[Any]] = None


class ValidateBody(BaseModel):
    data: Optional[dict[str, Any]] = None
    format: list[dict[str, Any]]


def _source_to_json(source):
    if isinstance(source, str):
        return source
    return source.to_json_obj()


def create_app(
    store: AnnotationStore | None = None,
    session_ttl_s: float = 8 * 3600,
    client_factory=None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="annokit", version=__version__)
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.store = store or AnnotationStore(":memory:")
    app.state.sessions = SessionManager(ttl_s=session_ttl_s)
    app.state.backends = BackendManager(app.state.store, client_factory=client_factory)

    @app.exception_handler(ApiProblem)
    async def _problem_handler(request: Request, exc: ApiProblem):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    def _wrap_store_error(e: StoreError) -> ApiProblem:
        if isinstance(e, PermissionDenied):
            return ApiProblem(403, "permission_denied", str(e))
        if isinstance(e, (UnknownTask, UnknownUser)):
            return ApiProblem(404, "not_found", str(e))
        if isinstance(e, NotAssigned):
            return ApiProblem(403, "not_assigned", str(e))
        if isinstance(e, RoleMismatch):
            return ApiProblem(422, "role_mismatch", str(e))
        if isinstance(e, LeaseConflict):
            return ApiProblem(409, "lease_conflict", str(e))
        if isinstance(e, ValidationFailed):
            return ApiProblem(
                422, "validation_failed", str(e),
                details=[v.to_json_obj() for v in e.violations],
            )
        return ApiProblem(500, "store_error", str(e))

    def current_user(authorization: str = Header(default="")):
        if not authorization.startswith("Bearer "):
            raise ApiProblem(401, "unauthenticated", "missing bearer token")
        session = app.state.sessions.resolve(authorization.removeprefix("Bearer "))
        if session is None:
            raise ApiProblem(401, "unauthenticated", "invalid or expired token")
        return app.state.store.get_user(session.user_id)

    def require_admin(user=Depends(current_user)):
        if user.role != ROLE_ADMIN:
            raise ApiProblem(403, "forbidden", "administrator role required")
        return user

    # ------------------------------------------------------------- meta

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__, "kernels": KERNEL_BACKEND}

    # ------------------------------------------------------------- users

    @app.post("/users", status_code=201)
    def register(body: RegisterBody):
        if not body.password:
            raise ApiProblem(422, "weak_password", "password must be non-empty")
        try:
            user = app.state.store.create_user(
                body.name, body.role, body.demographics, secret=body.password
            )
        except RoleMismatch as e:
            raise _wrap_store_error(e)
        except Exception:
            raise ApiProblem(409, "name_taken", f"user name {body.name!r} already exists")
        return {
            "user_id": user.user_id,
            "name": user.name,
            "role": user.role,
            "demographics": user.demographics,
        }

    @app.post("/login")
    def login(body: LoginBody):
        try:
            user = app.state.store.find_user(body.name, secret=body.password)
        except UnknownUser:
            raise ApiProblem(401, "bad_credentials", "unknown user or wrong password")
        session = app.state.sessions.issue(user.user_id)
        return {
            "token": session.token,
            "user_id": user.user_id,
            "name": user.name,
            "role": user.role,
            "expires_at_ms": session.expires_at_ms,
        }

    # ------------------------------------------------------------- tasks

    def _task_summary(task_id: str) -> dict:
        task = app.state.store.get_task(task_id)
        names = []
        for uid in sorted(task.assignees):
            try:
                names.append(app.state.store.get_user(uid).name)
            except UnknownUser:
                names.append(uid)
        return {
            "task_id": task.task_id,
            "backend": task.backend,
            "policy": task.policy,
            "n_instances": len(task.document),
            "n_done": int(sum(task.document.done)),
            "assignees": names,
        }

    @app.get("/tasks")
    def list_tasks(user=Depends(current_user)):
        ids = app.state.store.list_tasks(user.user_id)
        return {"tasks": [_task_summary(t) for t in ids]}

    @app.post("/tasks", status_code=201)
    def create_task(body: CreateTaskBody, user=Depends(require_admin)):
        try:
            spec = parse_interface_spec({"format": body.format})
            doc = parse_task_document({"data": body.data})
        except SchemaError as e:
            raise ApiProblem(422, "invalid_task_file", str(e))
        try:
            task_id = app.state.store.create_task(
                user.user_id, spec, doc,
                backend=body.backend,
                backend_config=body.backend_config,
                policy=body.policy,
            )
        except StoreError as e:
            raise _wrap_store_error(e)
        try:
            app.state.backends._get(app.state.store.get_task(task_id))
        except ValueError as e:
            raise ApiProblem(422, "invalid_backend_config", str(e))
        return {"task_id": task_id}

    @app.get("/tasks/{task_id}")
    def task_detail(task_id: str, user=Depends(current_user)):
        try:
            task = app.state.store.get_task(task_id)
        except StoreError as e:
            raise _wrap_store_error(e)
        if user.role != ROLE_ADMIN and user.user_id not in task.assignees:
            raise ApiProblem(403, "not_assigned", "task is not assigned to you")
        summary = _task_summary(task_id)
        summary["format"] = task.interface.to_json_obj()
        return summary

    @app.post("/tasks/{task_id}/assign")
    def assign(task_id: str, body: AssignBody, user=Depends(require_admin)):
        store = app.state.store
        try:
            try:
                annotator = store.find_user(body.annotator)
            except UnknownUser:
                annotator = store.get_user(body.annotator)
            store.assign(task_id, annotator.user_id)
        except StoreError as e:
            raise _wrap_store_error(e)
        return {"task_id": task_id, "annotator": annotator.name}

    @app.get("/tasks/{task_id}/next")
    def next_instance(task_id: str, user=Depends(current_user)):
        try:
            served = app.state.store.next_instance(task_id, user.user_id)
        except StoreError as e:
            raise _wrap_store_error(e)
        if served is None:
            return Response(status_code=204)
        return {
            "instance_index": served.instance_index,
            "source": _source_to_json(served.source),
            "questions": list(served.questions),
            "served_at_ms": served.served_at_ms,
            "suggestion": served.suggestion,
        }

    @app.post("/tasks/{task_id}/annotations")
    def submit(
        task_id: str,
        body: SubmitBody,
        user=Depends(current_user),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        results = [
            [tuple(s) for s in v] if isinstance(v, list) else v for v in body.results
        ]
        shown = body.suggestion_shown
        if shown is not None:
            shown = [
                [tuple(s) for s in v] if isinstance(v, list) else v for v in shown
            ]
        try:
            record_id = app.state.store.submit_annotation(
                task_id,
                user.user_id,
                body.instance_index,
                results,
                suggestion_shown=shown,
                accepted_unchanged=body.accepted_unchanged,
                idempotency_key=idempotency_key,
            )
        except StoreError as e:
            raise _wrap_store_error(e)
        task = app.state.store.get_task(task_id)
        return {"record_id": record_id, "done_count": int(sum(task.document.done))}

    @app.get("/tasks/{task_id}/export")
    def export(task_id: str, user=Depends(require_admin)):
        try:
            return app.state.store.export(task_id)
        except StoreError as e:
            raise _wrap_store_error(e)

    @app.get("/tasks/{task_id}/records")
    def records(task_id: str, user=Depends(require_admin)):
        try:
            ndjson = app.state.store.export_records_ndjson(task_id)
        except StoreError as e:
            raise _wrap_store_error(e)
        return PlainTextResponse(ndjson, media_type="application/x-ndjson")

    # --------------------------------------------------------- validation

    @app.post("/validate")
    def validate(body: ValidateBody, user=Depends(current_user)):
        try:
            spec = parse_interface_spec({"format": body.format})
        except SchemaError as e:
            return {"violations": [
                {"rule": type(e).__name__, "message": str(e),
                 "instance": None, "component": getattr(e, "index", None)}
            ]}
        if body.data is None:
            return {"violations": []}
        try:
            doc = parse_task_document({"data": body.data})
        except SchemaError as e:
            return {"violations": [
                {"rule": type(e).__name__, "message": str(e),
                 "instance": None, "component": None}
            ]}
        return {
            "violations": [v.to_json_obj() for v in validate_task_document(doc, spec)]
        }

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
