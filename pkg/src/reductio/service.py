"""HTTP service: workflow delivery, session grading, author tools.

All state lives in memory and is rebuilt on startup from an append-only
JSON-lines log of session creations and graded attempts, so a crash or
restart loses nothing but in-flight requests.  Routes sit under /api/v1,
speak application/json both ways, and report failures as {code, message}
bodies without stack traces.  Long verifications run synchronously under
the configured time budget; running out of budget yields a verdict
qualified by the bound actually completed, never an error.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.routing import APIRouter

from . import data, fol
from .constraints import ConstraintError
from .graphs import GraphError, instance_from_obj, instance_to_obj
from .problems import ProblemError
from .reductions import ReductionError, apply_reduction, spec_from_obj
from .verifier import VerifierError, verdict_to_obj, verify_auto
from .workflows import (
    MalformedPayloadError,
    OutputsConsumedError,
    Session,
    TaskLockedError,
    UnknownTaskError,
    Workflow,
    WorkflowError,
    attempt_result_to_obj,
    new_session,
    record_from_obj,
    record_to_obj,
    replay_session,
    session_state,
    submit_attempt,
    validate_workflow,
    workflow_from_obj,
)

DEFAULT_LISTEN_ADDRESS = "127.0.0.1:8000"
DEFAULT_SEARCH_TIME_BUDGET = 30.0

_ENV_PREFIX = "REDUCTIO_"

_PARSE_ERRORS = (
    ReductionError,
    GraphError,
    ProblemError,
    VerifierError,
    ConstraintError,
    fol.FolError,
)


class ServiceError(Exception):
    """A failed request, carrying its HTTP status and JSON error body."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass(frozen=True)
class ServiceConfig:
    listen_address: str = DEFAULT_LISTEN_ADDRESS
    workflows_dir: Path = field(default_factory=data.workflows_dir)
    session_store_path: Path = Path("sessions.jsonl")
    search_time_budget: float = DEFAULT_SEARCH_TIME_BUDGET
    cors_origins: tuple[str, ...] = ()


def config_from_obj(obj) -> ServiceConfig:
    """Parse a configuration file object; every key is optional."""
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    known = {
        "listenAddress",
        "workflowsDir",
        "sessionStorePath",
        "searchTimeBudget",
        "corsOrigins",
    }
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"unknown config key {sorted(unknown)[0]!r}")
    cfg = ServiceConfig()
    if "listenAddress" in obj:
        cfg = replace(cfg, listen_address=str(obj["listenAddress"]))
    if "workflowsDir" in obj:
        cfg = replace(cfg, workflows_dir=Path(obj["workflowsDir"]))
    if "sessionStorePath" in obj:
        cfg = replace(cfg, session_store_path=Path(obj["sessionStorePath"]))
    if "searchTimeBudget" in obj:
        budget = obj["searchTimeBudget"]
        if not isinstance(budget, (int, float)) or isinstance(budget, bool):
            raise ValueError("searchTimeBudget must be a number of seconds")
        cfg = replace(cfg, search_time_budget=float(budget))
    if "corsOrigins" in obj:
        origins = obj["corsOrigins"]
        if not isinstance(origins, list) or not all(
            isinstance(o, str) for o in origins
        ):
            raise ValueError("corsOrigins must be a list of origin strings")
        cfg = replace(cfg, cors_origins=tuple(origins))
    return cfg


def config_from_env(base: ServiceConfig | None = None) -> ServiceConfig:
    """Overlay REDUCTIO_* environment variables on a base configuration."""
    cfg = base if base is not None else ServiceConfig()
    env = os.environ
    if _ENV_PREFIX + "LISTEN_ADDRESS" in env:
        cfg = replace(cfg, listen_address=env[_ENV_PREFIX + "LISTEN_ADDRESS"])
    if _ENV_PREFIX + "WORKFLOWS_DIR" in env:
        cfg = replace(cfg, workflows_dir=Path(env[_ENV_PREFIX + "WORKFLOWS_DIR"]))
    if _ENV_PREFIX + "SESSION_STORE_PATH" in env:
        cfg = replace(
            cfg, session_store_path=Path(env[_ENV_PREFIX + "SESSION_STORE_PATH"])
        )
    if _ENV_PREFIX + "SEARCH_TIME_BUDGET" in env:
        raw = env[_ENV_PREFIX + "SEARCH_TIME_BUDGET"]
        try:
            cfg = replace(cfg, search_time_budget=float(raw))
        except ValueError:
            raise ValueError(
                f"{_ENV_PREFIX}SEARCH_TIME_BUDGET must be a number, got {raw!r}"
            ) from None
    if _ENV_PREFIX + "CORS_ORIGINS" in env:
        raw = env[_ENV_PREFIX + "CORS_ORIGINS"]
        origins = tuple(o.strip() for o in raw.split(",") if o.strip())
        cfg = replace(cfg, cors_origins=origins)
    return cfg


def split_listen_address(address: str) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep or not host:
        raise ValueError(f"listen address must be host:port, got {address!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ValueError(f"listen address has a bad port: {address!r}") from None


def load_workflows(directory: Path) -> dict[str, tuple[dict, Workflow]]:
    """Parse and validate every workflow file in a directory.

    Returns workflow id -> (raw file object, parsed workflow); the raw
    object is what GET /workflows/{id} serves back.  A file that fails to
    parse or validate stops startup: serving a broken workflow would
    strand every session created on it.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise ValueError(f"workflows directory {str(directory)!r} does not exist")
    out: dict[str, tuple[dict, Workflow]] = {}
    for path in sorted(directory.glob("*.json")):
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
            workflow = workflow_from_obj(obj)
        except (json.JSONDecodeError, WorkflowError, *_PARSE_ERRORS) as exc:
            raise ValueError(f"workflow file {path.name}: {exc}") from exc
        diagnostics = validate_workflow(workflow)
        if diagnostics:
            first = diagnostics[0]
            raise ValueError(
                f"workflow file {path.name}: task {first.task_id!r}: {first.message}"
            )
        if workflow.id in out:
            raise ValueError(f"workflow file {path.name}: duplicate id {workflow.id!r}")
        out[workflow.id] = (obj, workflow)
    return out


class SessionStore:
    """Append-only JSON-lines log, the only persistent state.

    Two line shapes: {"type": "session", "sessionId", "workflowId"} marks
    a creation, {"type": "attempt", "sessionId", "record"} a graded
    attempt.  A single appender guards the handle; every line is flushed
    and fsynced so a crash never loses an acknowledged attempt.
    """

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._handle = self.path.open("a", encoding="utf-8")

    def load(self) -> list[dict]:
        lines = self.path.read_text(encoding="utf-8").splitlines()
        return [json.loads(line) for line in lines if line.strip()]

    def _append(self, obj: dict) -> None:
        with self._lock:
            self._handle.write(json.dumps(obj, sort_keys=True) + "\n")
            self._handle.flush()
            os.fsync(self._handle.fileno())

    def append_session(self, session_id: str, workflow_id: str) -> None:
        self._append(
            {"type": "session", "sessionId": session_id, "workflowId": workflow_id}
        )

    def append_attempt(self, session_id: str, record) -> None:
        self._append(
            {"type": "attempt", "sessionId": session_id, "record": record_to_obj(record)}
        )

    def close(self) -> None:
        with self._lock:
            self._handle.close()


def recover_sessions(
    store: SessionStore, workflows: dict[str, tuple[dict, Workflow]]
) -> dict[str, Session]:
    """Replay the attempt log into fresh session objects."""
    owners: dict[str, str] = {}
    records: dict[str, list] = {}
    for entry in store.load():
        kind = entry.get("type")
        session_id = entry.get("sessionId")
        if kind == "session":
            owners[session_id] = entry["workflowId"]
            records[session_id] = []
        elif kind == "attempt":
            if session_id not in owners:
                raise ValueError(
                    f"attempt log names session {session_id!r} before its creation"
                )
            records[session_id].append(record_from_obj(entry["record"]))
        else:
            raise ValueError(f"attempt log has an entry of unknown type {kind!r}")
    sessions: dict[str, Session] = {}
    for session_id, workflow_id in owners.items():
        if workflow_id not in workflows:
            raise ValueError(
                f"attempt log names unknown workflow {workflow_id!r}; "
                "was the workflows directory changed?"
            )
        _, workflow = workflows[workflow_id]
        sessions[session_id] = replay_session(
            workflow, records[session_id], session_id
        )
    return sessions


class _State:
    """Everything one running service instance holds."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.workflows = load_workflows(config.workflows_dir)
        self.store = SessionStore(config.session_store_path)
        self.sessions = recover_sessions(self.store, self.workflows)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def session_lock(self, session_id: str) -> threading.Lock:
        # one lock per session serializes its attempts; reads stay lock-free
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())


def _session_or_404(state: _State, session_id: str) -> Session:
    session = state.sessions.get(session_id)
    if session is None:
        raise ServiceError(404, "unknownSession", f"unknown session {session_id!r}")
    return session


def _require_keys(body, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(body, dict):
        raise ServiceError(400, "badRequest", "request body must be a JSON object")
    missing = required - set(body)
    if missing:
        raise ServiceError(
            400, "badRequest", f"missing key {sorted(missing)[0]!r} in request body"
        )
    unknown = set(body) - required - optional
    if unknown:
        raise ServiceError(
            400, "badRequest", f"unknown key {sorted(unknown)[0]!r} in request body"
        )


router = APIRouter(prefix="/api/v1")


@router.get("/workflows")
def list_workflows(request: Request) -> list:
    state: _State = request.app.state.st
    return [
        {"id": workflow.id, "title": workflow.title}
        for _, (_, workflow) in sorted(state.workflows.items())
    ]


@router.get("/workflows/{workflow_id}")
def get_workflow(request: Request, workflow_id: str) -> dict:
    state: _State = request.app.state.st
    if workflow_id not in state.workflows:
        raise ServiceError(404, "unknownWorkflow", f"unknown workflow {workflow_id!r}")
    obj, _ = state.workflows[workflow_id]
    return obj


@router.post("/sessions")
def create_session(request: Request, body: dict = Body(...)) -> dict:
    state: _State = request.app.state.st
    _require_keys(body, {"workflowId"})
    workflow_id = body["workflowId"]
    if not isinstance(workflow_id, str):
        raise ServiceError(400, "badRequest", "workflowId must be a string")
    if workflow_id not in state.workflows:
        raise ServiceError(404, "unknownWorkflow", f"unknown workflow {workflow_id!r}")
    _, workflow = state.workflows[workflow_id]
    session_id = uuid.uuid4().hex
    with state.session_lock(session_id):
        state.sessions[session_id] = new_session(workflow, session_id)
        state.store.append_session(session_id, workflow_id)
    return {"sessionId": session_id}


@router.get("/sessions/{session_id}")
def get_session(request: Request, session_id: str) -> dict:
    state: _State = request.app.state.st
    return session_state(_session_or_404(state, session_id))


@router.post("/sessions/{session_id}/tasks/{task_id}/attempts")
def post_attempt(
    request: Request, session_id: str, task_id: str, body: dict = Body(...)
) -> dict:
    state: _State = request.app.state.st
    session = _session_or_404(state, session_id)
    _require_keys(body, {"payload"})
    with state.session_lock(session_id):
        logged = len(session.log)
        try:
            result = submit_attempt(
                session,
                task_id,
                body["payload"],
                search_time_budget=state.config.search_time_budget,
            )
        except UnknownTaskError as exc:
            raise ServiceError(404, "unknownTask", str(exc)) from exc
        except TaskLockedError as exc:
            raise ServiceError(409, "taskLocked", str(exc)) from exc
        except OutputsConsumedError as exc:
            raise ServiceError(409, "outputsConsumed", str(exc)) from exc
        except MalformedPayloadError as exc:
            raise ServiceError(400, "malformedPayload", str(exc)) from exc
        for record in session.log[logged:]:
            state.store.append_attempt(session_id, record)
    return attempt_result_to_obj(result)


@router.post("/tools/verify")
def tools_verify(request: Request, body: dict = Body(...)) -> dict:
    state: _State = request.app.state.st
    _require_keys(body, {"spec"}, {"bound"})
    try:
        spec = spec_from_obj(body["spec"])
        verdict = verify_auto(
            spec, body.get("bound"), time_budget=state.config.search_time_budget
        )
    except _PARSE_ERRORS as exc:
        raise ServiceError(400, "badRequest", str(exc)) from exc
    return verdict_to_obj(verdict)


@router.post("/tools/apply")
def tools_apply(request: Request, body: dict = Body(...)) -> dict:
    _require_keys(body, {"spec", "instance"})
    try:
        spec = spec_from_obj(body["spec"])
        source = instance_from_obj(body["instance"])
        target = apply_reduction(spec, source)
    except _PARSE_ERRORS as exc:
        raise ServiceError(400, "badRequest", str(exc)) from exc
    return instance_to_obj(target)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    """Build the application: load workflows, recover sessions, mount routes.

    Environment overrides are applied on top of the given configuration,
    so a REDUCTIO_* variable wins over both defaults and a config file.
    """
    cfg = config_from_env(config)
    state = _State(cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        state.store.close()

    app = FastAPI(
        title="reductio",
        lifespan=lifespan,
        openapi_url=None,
        docs_url=None,
        redoc_url=None,
    )
    app.state.st = state
    if cfg.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cfg.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    app.include_router(router)

    @app.exception_handler(ServiceError)
    async def service_error(request: Request, exc: ServiceError):
        return JSONResponse(
            {"code": exc.code, "message": exc.message}, status_code=exc.status
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            {"code": "badRequest", "message": "request body must be a JSON object"},
            status_code=400,
        )

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        return JSONResponse(
            {"code": "internalError", "message": "internal error"}, status_code=500
        )

    return app


def run_service(config: ServiceConfig | None = None) -> None:
    """Blocking entry point used by the serve subcommand."""
    import uvicorn

    app = create_app(config)
    host, port = split_listen_address(app.state.st.config.listen_address)
    uvicorn.run(app, host=host, port=port, log_level="info")
