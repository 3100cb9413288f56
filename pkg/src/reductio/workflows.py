"""Multi-step exercise workflows: task definitions, validation, grading.

A workflow is an ordered list of tasks wired into a DAG by prerequisites.
Later tasks can consume the published output of earlier ones through
references, so a reduction designed in one step feeds the apply step that
follows it.  Grading dispatches on the task kind: constraint checking for
construction and selection, the gadget verifier for design tasks,
isomorphism against the engine-built target for apply tasks, and the
candidate checker for solution transfer.

Validation never raises for content problems; it returns diagnostics that
name the offending task.  Attempt processing raises typed session errors
for out-of-contract requests (unknown task, locked task, malformed
payload, consumed outputs) and otherwise records the attempt, so a replay
of the attempt log reproduces the session state exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import fol
from .constraints import (
    All,
    Any,
    Cardinality,
    Constraint,
    ConstraintError,
    Isomorphy,
    Logical,
    NoneOf,
    Not,
    check,
    constraint_from_obj,
)
from .constraints import verdict_to_obj as constraint_verdict_to_obj
from .graphs import (
    Graph,
    GraphError,
    ProblemInstance,
    graph_from_obj,
    graph_to_obj,
    instance_from_obj,
    instance_to_obj,
    isomorphic,
)
from .problems import (
    ProblemError,
    ProblemId,
    candidate_verdict_to_obj,
    check_instance,
    problem_from_wire,
    verify_candidate,
)
from .reductions import (
    EDGE_FAMILY,
    GLOBAL_FAMILY,
    NODE_FAMILY,
    ParamMap,
    ReductionError,
    ReductionSpec,
    apply_reduction,
    spec_from_obj,
    spec_to_obj,
)
from .verifier import (
    OUTCOME_CORRECT,
    explain,
    search_node_limit,
    search_supported,
    verify_by_search,
    verify_vc_to_fvs_edge_gadget,
)
from .verifier import verdict_to_obj as verifier_verdict_to_obj


class WorkflowError(ValueError):
    """Raised when a workflow document is structurally malformed."""


class SessionError(ValueError):
    """Base class for attempt-time rejections."""


class UnknownTaskError(SessionError):
    pass


class TaskLockedError(SessionError):
    pass


class MalformedPayloadError(SessionError):
    pass


class OutputsConsumedError(SessionError):
    pass


TASK_KINDS = (
    "graphConstruction",
    "selection",
    "reductionDesign",
    "applyReduction",
    "solutionTransfer",
    "multipleChoice",
    "text",
)

SELECTION_MODES = ("nodes", "edges")

METHOD_NAMES = ("characterization", "search")

STATUS_LOCKED = "locked"
STATUS_OPEN = "open"
STATUS_COMPLETED = "completed"


# -- task definitions ------------------------------------------------------

@dataclass(frozen=True)
class TaskRef:
    """Reference to the published output of an earlier task."""

    task_id: str


@dataclass(frozen=True)
class GraphConstruction:
    editable: bool
    constraints: Constraint
    initial: Graph | TaskRef | None = None


@dataclass(frozen=True)
class Selection:
    graph: Graph | TaskRef
    mode: str  # "nodes" or "edges"
    constraints: Constraint


@dataclass(frozen=True)
class ReductionDesign:
    family: str
    source_problem: ProblemId
    target_problem: ProblemId
    verifier: str  # "characterization" or "search"
    max_nodes: int | None = None
    param_map: ParamMap | None = None
    fixed_source_budget: int | None = None
    sample_instance: ProblemInstance | None = None


@dataclass(frozen=True)
class ApplyReduction:
    spec: ReductionSpec | TaskRef
    source: ProblemInstance


@dataclass(frozen=True)
class SolutionTransfer:
    spec: ReductionSpec | TaskRef
    source: ProblemInstance
    source_solution: tuple[str, ...]
    constraints: Constraint


@dataclass(frozen=True)
class MultipleChoice:
    options: tuple[str, ...]
    correct: frozenset[int]


@dataclass(frozen=True)
class Text:
    body: str


Detail = (
    GraphConstruction
    | Selection
    | ReductionDesign
    | ApplyReduction
    | SolutionTransfer
    | MultipleChoice
    | Text
)


@dataclass(frozen=True)
class TaskDef:
    id: str
    kind: str
    detail: Detail
    prerequisites: tuple[str, ...] = ()
    title: str = ""  # display label, not used for grading


@dataclass(frozen=True)
class Workflow:
    id: str
    title: str
    tasks: tuple[TaskDef, ...]

    def task(self, task_id: str) -> TaskDef:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise UnknownTaskError(f"unknown task {task_id!r}")

    def has_task(self, task_id: str) -> bool:
        return any(t.id == task_id for t in self.tasks)


# published output type per kind, None for kinds nothing can reference
_OUTPUT_TYPES = {
    "graphConstruction": "graph",
    "selection": "graph",
    "reductionDesign": "reductionSpec",
    "applyReduction": "instance",
    "solutionTransfer": "nodeSet",
    "multipleChoice": None,
    "text": None,
}


def _task_refs(task: TaskDef) -> list[tuple[str, TaskRef, str]]:
    """(field name, reference, expected output type) for every TaskRef."""
    detail = task.detail
    out: list[tuple[str, TaskRef, str]] = []
    if isinstance(detail, GraphConstruction) and isinstance(detail.initial, TaskRef):
        out.append(("initial", detail.initial, "graph"))
    if isinstance(detail, Selection) and isinstance(detail.graph, TaskRef):
        out.append(("graph", detail.graph, "graph"))
    if isinstance(detail, (ApplyReduction, SolutionTransfer)):
        if isinstance(detail.spec, TaskRef):
            out.append(("spec", detail.spec, "reductionSpec"))
    return out


# -- wire format -----------------------------------------------------------

def _expect_keys(obj: dict, context: str, required: tuple, optional: tuple) -> None:
    for key in required:
        if key not in obj:
            raise WorkflowError(f"{context}: missing required key {key!r}")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise WorkflowError(f"{context}: unknown key {sorted(unknown)[0]!r}")


def _expect_str(value, label: str, allow_empty: bool = False) -> str:
    if not isinstance(value, str) or (not allow_empty and not value):
        raise WorkflowError(f"{label} must be a nonempty string")
    return value


def _graph_or_ref(value, label: str) -> Graph | TaskRef:
    if isinstance(value, dict) and set(value) == {"taskRef"}:
        return TaskRef(_expect_str(value["taskRef"], f"{label}.taskRef"))
    return graph_from_obj(value)


def _spec_or_ref(value, label: str) -> ReductionSpec | TaskRef:
    if isinstance(value, dict) and set(value) == {"taskRef"}:
        return TaskRef(_expect_str(value["taskRef"], f"{label}.taskRef"))
    return spec_from_obj(value)


def _param_map_from_obj(raw) -> ParamMap:
    if not isinstance(raw, list) or len(raw) != 4:
        raise WorkflowError("paramMap must be an array of four integers")
    return ParamMap(*raw)


def _verifier_from_obj(raw) -> tuple[str, int | None]:
    if not isinstance(raw, dict):
        raise WorkflowError("verifier must be a JSON object")
    method = raw.get("method")
    if method not in METHOD_NAMES:
        raise WorkflowError(f"unknown verifier method {method!r}")
    if method == "characterization":
        _expect_keys(raw, "verifier", ("method",), ())
        return method, None
    _expect_keys(raw, "verifier", ("method",), ("maxNodes",))
    max_nodes = raw.get("maxNodes")
    if max_nodes is not None:
        if not isinstance(max_nodes, int) or isinstance(max_nodes, bool) or max_nodes < 1:
            raise WorkflowError("maxNodes must be a positive integer")
    return method, max_nodes


_COMMON_KEYS = ("id", "kind", "title", "prerequisites")


def task_from_obj(obj) -> TaskDef:
    if not isinstance(obj, dict):
        raise WorkflowError("task must be a JSON object")
    task_id = _expect_str(obj.get("id"), "task id")
    kind = obj.get("kind")
    if kind not in TASK_KINDS:
        raise WorkflowError(f"unknown task kind {kind!r}")
    title = obj.get("title", "")
    if not isinstance(title, str):
        raise WorkflowError("title must be a string")
    raw_prereqs = obj.get("prerequisites", [])
    if not isinstance(raw_prereqs, list):
        raise WorkflowError("prerequisites must be an array of task ids")
    prereqs = tuple(_expect_str(p, "prerequisite") for p in raw_prereqs)
    if len(set(prereqs)) != len(prereqs):
        raise WorkflowError("duplicate prerequisite")

    if kind == "graphConstruction":
        _expect_keys(obj, kind, _COMMON_KEYS[:2] + ("editable", "constraints"),
                     _COMMON_KEYS[2:] + ("initial",))
        editable = obj["editable"]
        if not isinstance(editable, bool):
            raise WorkflowError("editable must be a boolean")
        initial = None
        if "initial" in obj:
            initial = _graph_or_ref(obj["initial"], "initial")
        detail: Detail = GraphConstruction(
            editable, constraint_from_obj(obj["constraints"]), initial
        )
    elif kind == "selection":
        _expect_keys(obj, kind, _COMMON_KEYS[:2] + ("graph", "mode", "constraints"),
                     _COMMON_KEYS[2:])
        mode = obj["mode"]
        if mode not in SELECTION_MODES:
            raise WorkflowError(f"unknown selection mode {mode!r}")
        detail = Selection(
            _graph_or_ref(obj["graph"], "graph"),
            mode,
            constraint_from_obj(obj["constraints"]),
        )
    elif kind == "reductionDesign":
        _expect_keys(
            obj, kind,
            _COMMON_KEYS[:2] + ("family", "sourceProblem", "targetProblem", "verifier"),
            _COMMON_KEYS[2:] + ("paramMap", "fixedSourceBudget", "sampleInstance"),
        )
        family = obj["family"]
        if family not in (EDGE_FAMILY, NODE_FAMILY, GLOBAL_FAMILY):
            raise WorkflowError(f"unknown family {family!r}")
        method, max_nodes = _verifier_from_obj(obj["verifier"])
        param_map = None
        if "paramMap" in obj:
            param_map = _param_map_from_obj(obj["paramMap"])
        fixed = obj.get("fixedSourceBudget")
        if fixed is not None:
            if not isinstance(fixed, int) or isinstance(fixed, bool) or fixed < 0:
                raise WorkflowError("fixedSourceBudget must be a nonnegative integer")
        sample = None
        if "sampleInstance" in obj:
            sample = instance_from_obj(obj["sampleInstance"])
        detail = ReductionDesign(
            family=family,
            source_problem=problem_from_wire(obj["sourceProblem"]),
            target_problem=problem_from_wire(obj["targetProblem"]),
            verifier=method,
            max_nodes=max_nodes,
            param_map=param_map,
            fixed_source_budget=fixed,
            sample_instance=sample,
        )
    elif kind == "applyReduction":
        _expect_keys(obj, kind, _COMMON_KEYS[:2] + ("spec", "source"), _COMMON_KEYS[2:])
        detail = ApplyReduction(
            _spec_or_ref(obj["spec"], "spec"), instance_from_obj(obj["source"])
        )
    elif kind == "solutionTransfer":
        _expect_keys(
            obj, kind,
            _COMMON_KEYS[:2] + ("spec", "source", "sourceSolution", "constraints"),
            _COMMON_KEYS[2:],
        )
        raw_solution = obj["sourceSolution"]
        if not isinstance(raw_solution, list):
            raise WorkflowError("sourceSolution must be an array of node ids")
        solution = tuple(sorted(_expect_str(v, "sourceSolution entry") for v in raw_solution))
        if len(set(solution)) != len(solution):
            raise WorkflowError("duplicate sourceSolution entry")
        detail = SolutionTransfer(
            _spec_or_ref(obj["spec"], "spec"),
            instance_from_obj(obj["source"]),
            solution,
            constraint_from_obj(obj["constraints"]),
        )
    elif kind == "multipleChoice":
        _expect_keys(obj, kind, _COMMON_KEYS[:2] + ("options", "correct"), _COMMON_KEYS[2:])
        raw_options = obj["options"]
        if not isinstance(raw_options, list) or not raw_options:
            raise WorkflowError("options must be a nonempty array of strings")
        options = tuple(_expect_str(o, "option") for o in raw_options)
        raw_correct = obj["correct"]
        if not isinstance(raw_correct, list):
            raise WorkflowError("correct must be an array of option indices")
        for index in raw_correct:
            if not isinstance(index, int) or isinstance(index, bool):
                raise WorkflowError("correct entries must be integers")
            if not 0 <= index < len(options):
                raise WorkflowError(f"correct index {index} is out of range")
        correct = frozenset(raw_correct)
        if len(correct) != len(raw_correct):
            raise WorkflowError("duplicate correct index")
        detail = MultipleChoice(options, correct)
    else:  # text
        _expect_keys(obj, kind, _COMMON_KEYS[:2] + ("body",), _COMMON_KEYS[2:])
        body = obj["body"]
        if not isinstance(body, str):
            raise WorkflowError("body must be a string")
        detail = Text(body)

    return TaskDef(task_id, kind, detail, prereqs, title)


_PARSE_ERRORS = (
    WorkflowError,
    GraphError,
    ConstraintError,
    fol.FolError,
    ReductionError,
    ProblemError,
)


def workflow_from_obj(obj) -> Workflow:
    """Parse a workflow document, raising on the first structural error.

    Referential and semantic invariants are the business of
    validate_workflow; a parsed Workflow may still carry diagnostics.
    """
    if not isinstance(obj, dict):
        raise WorkflowError("workflow must be a JSON object")
    _expect_keys(obj, "workflow", ("id", "title", "tasks"), ())
    workflow_id = _expect_str(obj.get("id"), "workflow id")
    title = obj.get("title")
    if not isinstance(title, str):
        raise WorkflowError("title must be a string")
    raw_tasks = obj.get("tasks")
    if not isinstance(raw_tasks, list):
        raise WorkflowError("tasks must be an array")
    tasks = []
    for position, raw in enumerate(raw_tasks):
        try:
            tasks.append(task_from_obj(raw))
        except _PARSE_ERRORS as exc:
            label = raw.get("id") if isinstance(raw, dict) else None
            where = label if isinstance(label, str) and label else f"tasks[{position}]"
            raise WorkflowError(f"task {where}: {exc}") from exc
    return Workflow(workflow_id, title, tuple(tasks))


# -- validation ------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    task_id: str  # empty for workflow-level findings
    message: str


def diagnostic_to_obj(d: Diagnostic) -> dict:
    return {"taskId": d.task_id, "message": d.message}


def _cycle_diagnostics(workflow: Workflow) -> list[Diagnostic]:
    ids = {t.id for t in workflow.tasks}
    prereqs = {t.id: [p for p in t.prerequisites if p in ids] for t in workflow.tasks}
    state: dict[str, int] = {}  # 1 visiting, 2 done
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        state[node] = 1
        stack.append(node)
        for nxt in prereqs[node]:
            mark = state.get(nxt)
            if mark == 1:
                return stack[stack.index(nxt):] + [nxt]
            if mark is None:
                found = visit(nxt)
                if found:
                    return found
        stack.pop()
        state[node] = 2
        return None

    for t in workflow.tasks:
        if state.get(t.id) is None:
            cycle = visit(t.id)
            if cycle:
                route = " -> ".join(cycle)
                return [Diagnostic(cycle[0], f"prerequisite cycle: {route}")]
    return []


def _ancestors(workflow: Workflow, task: TaskDef) -> set[str]:
    ids = {t.id for t in workflow.tasks}
    seen: set[str] = set()
    frontier = [p for p in task.prerequisites if p in ids]
    while frontier:
        current = frontier.pop()
        if current in seen:
            continue
        seen.add(current)
        frontier.extend(
            p for p in workflow.task(current).prerequisites if p in ids
        )
    return seen


def _resolved_design(workflow: Workflow, detail) -> ReductionDesign | None:
    """The design task definition behind a spec reference, if sound."""
    ref = detail.spec
    if not isinstance(ref, TaskRef):
        return None
    if not workflow.has_task(ref.task_id):
        return None
    target = workflow.task(ref.task_id)
    if not isinstance(target.detail, ReductionDesign):
        return None
    return target.detail


def _spec_problems(workflow: Workflow, detail) -> tuple[ProblemId, ProblemId, int | None] | None:
    """Source problem, target problem and fixed budget for a spec field."""
    if isinstance(detail.spec, ReductionSpec):
        spec = detail.spec
        return spec.source_problem, spec.target_problem, spec.fixed_source_budget
    design = _resolved_design(workflow, detail)
    if design is None:
        return None
    return design.source_problem, design.target_problem, design.fixed_source_budget


def _design_diagnostics(task: TaskDef) -> list[Diagnostic]:
    detail = task.detail
    out = []
    src, tgt = detail.source_problem, detail.target_problem
    if detail.verifier == "characterization":
        characterizable = (
            detail.family == EDGE_FAMILY
            and src is ProblemId.VERTEX_COVER
            and tgt is ProblemId.FEEDBACK_VERTEX_SET
            and detail.param_map in (None, ParamMap(1, 0, 0, 0))
            and detail.fixed_source_budget is None
        )
        if not characterizable:
            out.append(Diagnostic(task.id, (
                "the characterization verifier needs a vertex cover to feedback "
                "vertex set edge reduction with the identity parameter map and "
                "no fixed budget"
            )))
    else:
        if not search_supported(src, tgt, detail.family):
            out.append(Diagnostic(task.id, (
                f"bounded search does not support "
                f"({src.value}, {tgt.value}, {detail.family})"
            )))
        elif detail.max_nodes is not None:
            limit = search_node_limit(src)
            if detail.max_nodes > limit:
                out.append(Diagnostic(task.id, (
                    f"maxNodes {detail.max_nodes} exceeds the {limit} node "
                    f"oracle bound for {src.value} sources"
                )))
    if detail.param_map is not None and not tgt.requires_budget:
        out.append(Diagnostic(task.id, f"{tgt.value} takes no budget, drop the parameter map"))
    if detail.fixed_source_budget is not None and not src.requires_budget:
        out.append(Diagnostic(task.id, f"{src.value} takes no budget, drop fixedSourceBudget"))
    if detail.sample_instance is not None:
        try:
            check_instance(src, detail.sample_instance)
        except ProblemError as exc:
            out.append(Diagnostic(task.id, f"sampleInstance: {exc}"))
        else:
            fixed = detail.fixed_source_budget
            if fixed is not None and detail.sample_instance.budget != fixed:
                out.append(Diagnostic(
                    task.id, "sampleInstance budget must equal fixedSourceBudget"
                ))
    return out


def _source_diagnostics(task: TaskDef, problems) -> list[Diagnostic]:
    """Checks shared by apply and transfer tasks once the reduction spec resolves."""
    detail = task.detail
    src, _tgt, fixed = problems
    out = []
    try:
        check_instance(src, detail.source)
    except ProblemError as exc:
        return [Diagnostic(task.id, f"source: {exc}")]
    if fixed is not None and detail.source.budget != fixed:
        out.append(Diagnostic(
            task.id,
            f"source budget {detail.source.budget} does not match "
            f"the fixed source budget {fixed}",
        ))
    return out


def _transfer_diagnostics(task: TaskDef, problems) -> list[Diagnostic]:
    detail = task.detail
    src, tgt, _fixed = problems
    hams = (ProblemId.HAM_CYCLE_DIRECTED, ProblemId.HAM_CYCLE_UNDIRECTED)
    if src in hams or tgt in hams:
        return [Diagnostic(
            task.id, "solution transfer needs subset problems on both sides"
        )]
    stray = sorted(set(detail.source_solution) - set(detail.source.graph.nodes))
    if stray:
        return [Diagnostic(
            task.id, f"sourceSolution node {stray[0]!r} is not in the source graph"
        )]
    verdict = verify_candidate(src, detail.source, frozenset(detail.source_solution))
    if not verdict.valid:
        return [Diagnostic(
            task.id,
            f"sourceSolution is not a valid {src.value} solution "
            f"({verdict.witness.kind})",
        )]
    return []


def _semantic_diagnostics(workflow: Workflow) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    seen_ids: set[str] = set()
    for t in workflow.tasks:
        if t.id in seen_ids:
            out.append(Diagnostic(t.id, f"duplicate task id {t.id!r}"))
        seen_ids.add(t.id)

    order = {}
    for position, t in enumerate(workflow.tasks):
        order.setdefault(t.id, position)

    for position, t in enumerate(workflow.tasks):
        for p in t.prerequisites:
            if p not in seen_ids:
                out.append(Diagnostic(t.id, f"unresolved reference: unknown task {p!r}"))
            elif p == t.id:
                out.append(Diagnostic(t.id, "prerequisite cycle: a task cannot require itself"))
        ancestors = _ancestors(workflow, t)
        for field_name, ref, expected in _task_refs(t):
            rid = ref.task_id
            if rid not in seen_ids:
                out.append(Diagnostic(
                    t.id, f"unresolved reference: unknown task {rid!r} in {field_name}"
                ))
                continue
            if order[rid] >= position:
                out.append(Diagnostic(
                    t.id, f"task reference {rid!r} must point to an earlier task"
                ))
                continue
            produced = _OUTPUT_TYPES[workflow.task(rid).kind]
            if produced != expected:
                out.append(Diagnostic(
                    t.id,
                    f"task reference {rid!r} must point to a task that "
                    f"publishes a {expected}, not {produced or 'nothing'}",
                ))
                continue
            if rid not in ancestors:
                out.append(Diagnostic(
                    t.id, f"referenced task {rid!r} must be a prerequisite"
                ))

        detail = t.detail
        if isinstance(detail, GraphConstruction):
            if not detail.editable and detail.initial is None:
                out.append(Diagnostic(
                    t.id, "a non-editable construction task needs an initial graph"
                ))
        elif isinstance(detail, ReductionDesign):
            out.extend(_design_diagnostics(t))
        elif isinstance(detail, (ApplyReduction, SolutionTransfer)):
            problems = _spec_problems(workflow, detail)
            if problems is None:
                # a broken spec reference was already diagnosed above
                continue
            source_diags = _source_diagnostics(t, problems)
            out.extend(source_diags)
            if isinstance(detail, SolutionTransfer) and not source_diags:
                out.extend(_transfer_diagnostics(t, problems))

    out.extend(_cycle_diagnostics(workflow))
    return out


def validate_workflow(source) -> list[Diagnostic]:
    """Diagnostics for a workflow document or parsed Workflow.

    Given a raw object, shape and parse errors come back as diagnostics
    instead of exceptions, one per broken task; semantic checks run once
    everything parses.  The list is empty exactly when the workflow is
    well formed.
    """
    if isinstance(source, Workflow):
        return _semantic_diagnostics(source)
    if not isinstance(source, dict):
        return [Diagnostic("", "workflow must be a JSON object")]
    out: list[Diagnostic] = []
    for key in ("id", "title", "tasks"):
        if key not in source:
            out.append(Diagnostic("", f"workflow: missing required key {key!r}"))
    unknown = set(source) - {"id", "title", "tasks"}
    if unknown:
        out.append(Diagnostic("", f"workflow: unknown key {sorted(unknown)[0]!r}"))
    if out:
        return out
    if not isinstance(source.get("id"), str) or not source["id"]:
        out.append(Diagnostic("", "workflow id must be a nonempty string"))
    if not isinstance(source.get("title"), str):
        out.append(Diagnostic("", "title must be a string"))
    raw_tasks = source.get("tasks")
    if not isinstance(raw_tasks, list):
        out.append(Diagnostic("", "tasks must be an array"))
        return out
    tasks = []
    for position, raw in enumerate(raw_tasks):
        label = raw.get("id") if isinstance(raw, dict) else None
        where = label if isinstance(label, str) and label else f"tasks[{position}]"
        try:
            tasks.append(task_from_obj(raw))
        except _PARSE_ERRORS as exc:
            out.append(Diagnostic(where, str(exc)))
    if out:
        return out
    workflow = Workflow(source["id"], source["title"], tuple(tasks))
    return _semantic_diagnostics(workflow)


# -- sessions --------------------------------------------------------------

@dataclass(frozen=True)
class AttemptRecord:
    at: str  # UTC timestamp, informational only
    task_id: str
    payload: dict
    verdict: dict  # carries "accepted"


def record_to_obj(r: AttemptRecord) -> dict:
    return {"at": r.at, "taskId": r.task_id, "payload": r.payload, "verdict": r.verdict}


def record_from_obj(obj) -> AttemptRecord:
    if not isinstance(obj, dict):
        raise WorkflowError("attempt record must be a JSON object")
    _expect_keys(obj, "attempt record", ("at", "taskId", "payload", "verdict"), ())
    at = obj["at"]
    task_id = obj["taskId"]
    payload = obj["payload"]
    verdict = obj["verdict"]
    if not isinstance(at, str) or not isinstance(task_id, str):
        raise WorkflowError("attempt record fields have the wrong type")
    if not isinstance(payload, dict) or not isinstance(verdict, dict):
        raise WorkflowError("attempt record fields have the wrong type")
    return AttemptRecord(at, task_id, payload, verdict)


@dataclass
class Session:
    session_id: str
    workflow: Workflow
    completed: set[str] = field(default_factory=set)
    outputs: dict[str, dict] = field(default_factory=dict)
    attempt_counts: dict[str, int] = field(default_factory=dict)
    log: list[AttemptRecord] = field(default_factory=list)


@dataclass(frozen=True)
class AttemptResult:
    verdict: dict
    feedback: str
    outputs_published: bool


def attempt_result_to_obj(r: AttemptResult) -> dict:
    return {
        "verdict": r.verdict,
        "feedback": r.feedback,
        "outputsPublished": r.outputs_published,
    }


def new_session(workflow: Workflow, session_id: str) -> Session:
    return Session(session_id, workflow)


def task_status(session: Session, task_id: str) -> str:
    task = session.workflow.task(task_id)
    if task.id in session.completed:
        return STATUS_COMPLETED
    if all(p in session.completed for p in task.prerequisites):
        return STATUS_OPEN
    return STATUS_LOCKED


def session_state(session: Session) -> dict:
    """Stable snapshot of task progress and published outputs."""
    tasks = []
    for t in session.workflow.tasks:
        tasks.append({
            "id": t.id,
            "title": t.title,
            "kind": t.kind,
            "status": task_status(session, t.id),
            "attemptCount": session.attempt_counts.get(t.id, 0),
            "outputs": session.outputs.get(t.id),
        })
    return {
        "sessionId": session.session_id,
        "workflowId": session.workflow.id,
        "tasks": tasks,
    }


def _consumers(workflow: Workflow, task_id: str) -> list[str]:
    return [
        t.id
        for t in workflow.tasks
        if any(ref.task_id == task_id for _name, ref, _tp in _task_refs(t))
    ]


# -- payload parsing and grading -------------------------------------------

def _payload_keys(payload, context: str, required: tuple, optional: tuple = ()) -> None:
    if not isinstance(payload, dict):
        raise MalformedPayloadError(f"malformed payload: {context} must be a JSON object")
    for key in required:
        if key not in payload:
            raise MalformedPayloadError(f"malformed payload: missing key {key!r}")
    unknown = set(payload) - set(required) - set(optional)
    if unknown:
        raise MalformedPayloadError(
            f"malformed payload: unknown key {sorted(unknown)[0]!r}"
        )


def _payload_graph(payload) -> Graph:
    _payload_keys(payload, "submission", ("graph",))
    try:
        return graph_from_obj(payload["graph"])
    except GraphError as exc:
        raise MalformedPayloadError(f"malformed payload: {exc}") from exc


def _resolve_graph(session: Session, value: Graph | TaskRef) -> Graph:
    if isinstance(value, TaskRef):
        # unlock order guarantees the output exists
        return graph_from_obj(session.outputs[value.task_id]["graph"])
    return value


def _resolve_spec(session: Session, value: ReductionSpec | TaskRef) -> ReductionSpec:
    if isinstance(value, TaskRef):
        return spec_from_obj(session.outputs[value.task_id]["spec"])
    return value


_ASSIGNMENT_CAP = 10_000  # skip witness search on oversized products


def _falsifying_assignment(formula: fol.Formula, g: Graph) -> dict[str, str] | None:
    """First assignment of the leading forall block that breaks the matrix."""
    binders: list[str] = []
    body = formula
    while isinstance(body, fol.Quant) and body.kind == "forall":
        binders.append(body.var)
        body = body.body
    if not binders or len(g.nodes) ** len(binders) > _ASSIGNMENT_CAP:
        return None
    for values in itertools.product(g.nodes, repeat=len(binders)):
        env = dict(zip(binders, values))
        if not fol.evaluate(body, g, env):
            return env
    return None


_WALK_NAMES = {
    Isomorphy: "Isomorphy",
    Cardinality: "Cardinality",
    Logical: "Logical",
    Not: "Not",
    All: "All",
    Any: "Any",
    NoneOf: "None",
}


def _logical_witnesses(c: Constraint, g: Graph) -> dict[str, dict[str, str]]:
    """Falsifying assignments for failing Logical leaves, keyed by path.

    Leaves under Not and NoneOf fail by holding, so there is nothing to
    point at and they are skipped.
    """
    out: dict[str, dict[str, str]] = {}

    def walk(node: Constraint, path: str) -> None:
        if isinstance(node, Logical):
            if not fol.evaluate(node.formula, g):
                witness = _falsifying_assignment(node.formula, g)
                if witness:
                    out[path] = witness
        elif isinstance(node, (All, Any)):
            for i, child in enumerate(node.children):
                walk(child, f"{path}[{i}].{_WALK_NAMES[type(child)]}")

    walk(c, _WALK_NAMES[type(c)])
    return out


def _constraint_verdict(constraints: Constraint, g: Graph) -> tuple[bool, dict, str]:
    verdict = check(constraints, g)
    witnesses = _logical_witnesses(constraints, g) if not verdict.satisfied else {}
    obj = constraint_verdict_to_obj(verdict)
    obj["witnesses"] = [
        {"path": path, "assignment": witnesses[path]}
        for path, _message in verdict.violations
        if path in witnesses
    ]
    parts = []
    for path, message in verdict.violations:
        extra = witnesses.get(path)
        if extra:
            where = ", ".join(f"{var} = {val}" for var, val in extra.items())
            parts.append(f"{message} (fails at {where})")
        else:
            parts.append(message)
    return verdict.satisfied, obj, "; ".join(parts)


def _same_structure(a: Graph, b: Graph) -> bool:
    return a.directed == b.directed and a.nodes == b.nodes and a.edges == b.edges


def _grade_construction(session: Session, detail: GraphConstruction, payload):
    g = _payload_graph(payload)
    if not detail.editable:
        base = _resolve_graph(session, detail.initial)
        if not _same_structure(g, base):
            raise MalformedPayloadError(
                "malformed payload: the graph of this task is not editable"
            )
    satisfied, obj, feedback = _constraint_verdict(detail.constraints, g)
    verdict = {"accepted": satisfied, "constraints": obj}
    output = {"type": "graph", "graph": graph_to_obj(g)} if satisfied else None
    return satisfied, verdict, feedback, output


def _grade_selection(session: Session, detail: Selection, payload):
    g = _payload_graph(payload)
    base = _resolve_graph(session, detail.graph)
    if not _same_structure(g, base):
        raise MalformedPayloadError(
            "malformed payload: the task graph may not be edited in a selection task"
        )
    if (g.highlighted_nodes, g.highlighted_edges) != (
        base.highlighted_nodes, base.highlighted_edges
    ):
        raise MalformedPayloadError(
            "malformed payload: highlights may not be edited"
        )
    if detail.mode == "nodes" and g.selected_edges != base.selected_edges:
        raise MalformedPayloadError(
            "malformed payload: edge selection is not available in this task"
        )
    if detail.mode == "edges" and g.selected_nodes != base.selected_nodes:
        raise MalformedPayloadError(
            "malformed payload: node selection is not available in this task"
        )
    satisfied, obj, feedback = _constraint_verdict(detail.constraints, g)
    verdict = {"accepted": satisfied, "constraints": obj}
    output = {"type": "graph", "graph": graph_to_obj(g)} if satisfied else None
    return satisfied, verdict, feedback, output


_FAMILY_PAYLOAD_KEYS = {
    EDGE_FAMILY: (("edgeGadget",), ("nonEdgeGadget",)),
    NODE_FAMILY: (("nodeGadget",), ()),
    GLOBAL_FAMILY: (("globalGadget",), ()),
}


def _design_spec(detail: ReductionDesign, payload) -> ReductionSpec:
    required, optional = _FAMILY_PAYLOAD_KEYS[detail.family]
    _payload_keys(payload, "submission", required, optional)
    obj = {
        "family": detail.family,
        "sourceProblem": detail.source_problem.value,
        "targetProblem": detail.target_problem.value,
    }
    if detail.param_map is not None:
        pm = detail.param_map
        obj["paramMap"] = [pm.alpha, pm.beta, pm.gamma, pm.delta]
    if detail.fixed_source_budget is not None:
        obj["fixedSourceBudget"] = detail.fixed_source_budget
    obj.update(payload)
    try:
        return spec_from_obj(obj)
    except (ReductionError, GraphError, ProblemError) as exc:
        raise MalformedPayloadError(f"malformed payload: {exc}") from exc


def _grade_design(detail: ReductionDesign, payload, time_budget):
    spec = _design_spec(detail, payload)
    if detail.verifier == "characterization":
        verdict = verify_vc_to_fvs_edge_gadget(spec)
    else:
        verdict = verify_by_search(
            spec, max_nodes=detail.max_nodes, time_budget=time_budget
        )
    accepted = verdict.outcome == OUTCOME_CORRECT
    obj = {"accepted": accepted, "verifier": verifier_verdict_to_obj(verdict)}
    output = {"type": "reductionSpec", "spec": spec_to_obj(spec)} if accepted else None
    return accepted, obj, explain(verdict), output


def _grade_apply(session: Session, detail: ApplyReduction, payload):
    g = _payload_graph(payload)
    spec = _resolve_spec(session, detail.spec)
    expected = apply_reduction(spec, detail.source)
    accepted = (
        g.directed == expected.graph.directed
        and isomorphic(g, expected.graph, respect_marks=False) is not None
    )
    verdict = {
        "accepted": accepted,
        "expected": {"nodes": len(expected.graph.nodes), "edges": len(expected.graph.edges)},
        "submitted": {"nodes": len(g.nodes), "edges": len(g.edges)},
    }
    if accepted:
        feedback = ""
    else:
        feedback = (
            "not isomorphic to the expected target graph (expected "
            f"{len(expected.graph.nodes)} nodes and {len(expected.graph.edges)} "
            f"edges, submitted {len(g.nodes)} nodes and {len(g.edges)} edges)"
        )
    output = {"type": "instance", "instance": instance_to_obj(expected)} if accepted else None
    return accepted, verdict, feedback, output


def _grade_transfer(session: Session, detail: SolutionTransfer, payload):
    _payload_keys(payload, "submission", ("nodes",))
    raw = payload["nodes"]
    if not isinstance(raw, list) or not all(isinstance(v, str) for v in raw):
        raise MalformedPayloadError("malformed payload: nodes must be an array of node ids")
    chosen = frozenset(raw)
    spec = _resolve_spec(session, detail.spec)
    target = apply_reduction(spec, detail.source)
    stray = sorted(chosen - set(target.graph.nodes))
    if stray:
        verdict = {"accepted": False, "candidate": None, "constraints": None}
        feedback = f"node {stray[0]!r} is not in the target graph"
        return False, verdict, feedback, None
    candidate = verify_candidate(spec.target_problem, target, chosen)
    marked = Graph(
        target.graph.directed,
        target.graph.nodes,
        target.graph.edges,
        selected_nodes=chosen,
        highlighted_nodes=target.graph.highlighted_nodes,
        selected_edges=target.graph.selected_edges,
        highlighted_edges=target.graph.highlighted_edges,
    )
    satisfied, obj, constraint_feedback = _constraint_verdict(detail.constraints, marked)
    accepted = candidate.valid and satisfied
    verdict = {
        "accepted": accepted,
        "candidate": candidate_verdict_to_obj(candidate),
        "constraints": obj,
    }
    parts = []
    if not candidate.valid:
        w = candidate.witness
        if w.kind == "budget" and spec.target_problem.minimizing:
            parts.append(f"the candidate uses {w.actual} nodes but only {w.allowed} are allowed")
        elif w.kind == "budget":
            parts.append(f"the candidate has {w.actual} nodes but needs at least {w.allowed}")
        else:
            names = ", ".join(w.nodes)
            parts.append(f"not a valid {spec.target_problem.value} solution ({w.kind}: {names})")
    if constraint_feedback:
        parts.append(constraint_feedback)
    output = {"type": "nodeSet", "nodes": sorted(chosen)} if accepted else None
    return accepted, verdict, "; ".join(parts), output


def _grade_choice(detail: MultipleChoice, payload):
    _payload_keys(payload, "submission", ("selected",))
    raw = payload["selected"]
    if not isinstance(raw, list):
        raise MalformedPayloadError("malformed payload: selected must be an array of indices")
    for index in raw:
        if not isinstance(index, int) or isinstance(index, bool):
            raise MalformedPayloadError("malformed payload: selected entries must be integers")
        if not 0 <= index < len(detail.options):
            raise MalformedPayloadError(f"malformed payload: selected index {index} is out of range")
    chosen = frozenset(raw)
    accepted = chosen == detail.correct
    verdict = {"accepted": accepted, "selected": sorted(chosen)}
    feedback = "" if accepted else "the selected options are not the correct set"
    return accepted, verdict, feedback, None


def _grade_text(payload):
    _payload_keys(payload, "submission", ())
    return True, {"accepted": True}, "", None


def _grade(session: Session, task: TaskDef, payload, time_budget):
    detail = task.detail
    if isinstance(detail, GraphConstruction):
        return _grade_construction(session, detail, payload)
    if isinstance(detail, Selection):
        return _grade_selection(session, detail, payload)
    if isinstance(detail, ReductionDesign):
        return _grade_design(detail, payload, time_budget)
    if isinstance(detail, ApplyReduction):
        return _grade_apply(session, detail, payload)
    if isinstance(detail, SolutionTransfer):
        return _grade_transfer(session, detail, payload)
    if isinstance(detail, MultipleChoice):
        return _grade_choice(detail, payload)
    return _grade_text(payload)


def _output_for(session: Session, task: TaskDef, payload) -> dict | None:
    """Published output of an accepted payload, without re-grading."""
    detail = task.detail
    if isinstance(detail, (GraphConstruction, Selection)):
        return {"type": "graph", "graph": graph_to_obj(_payload_graph(payload))}
    if isinstance(detail, ReductionDesign):
        return {"type": "reductionSpec", "spec": spec_to_obj(_design_spec(detail, payload))}
    if isinstance(detail, ApplyReduction):
        spec = _resolve_spec(session, detail.spec)
        return {"type": "instance", "instance": instance_to_obj(apply_reduction(spec, detail.source))}
    if isinstance(detail, SolutionTransfer):
        return {"type": "nodeSet", "nodes": sorted(set(payload["nodes"]))}
    return None


def submit_attempt(
    session: Session,
    task_id: str,
    payload,
    *,
    search_time_budget: float | None = None,
    timestamp: str | None = None,
) -> AttemptResult:
    """Grade one submission and record it in the session log.

    Raises UnknownTaskError, TaskLockedError, OutputsConsumedError or
    MalformedPayloadError without recording anything; every graded
    attempt, accepted or not, lands in the log.  Accepted attempts mark
    the task completed and publish its output.  Resubmitting a completed
    task is allowed until a downstream task has attempted against its
    output, after which the output is frozen.
    """
    task = session.workflow.task(task_id)
    status = task_status(session, task_id)
    if status == STATUS_LOCKED:
        raise TaskLockedError(f"task {task_id!r} is locked")
    if status == STATUS_COMPLETED and task_id in session.outputs:
        for consumer in _consumers(session.workflow, task_id):
            if session.attempt_counts.get(consumer, 0) > 0:
                raise OutputsConsumedError(
                    f"outputs of task {task_id!r} were already consumed "
                    f"by task {consumer!r}"
                )
    accepted, verdict, feedback, output = _grade(
        session, task, payload, search_time_budget
    )
    at = timestamp if timestamp is not None else datetime.now(timezone.utc).isoformat()
    session.attempt_counts[task_id] = session.attempt_counts.get(task_id, 0) + 1
    session.log.append(AttemptRecord(at, task_id, payload, verdict))
    if accepted:
        session.completed.add(task_id)
        if output is not None:
            session.outputs[task_id] = output
    return AttemptResult(verdict, feedback, accepted and output is not None)


def replay_session(
    workflow: Workflow, records, session_id: str
) -> Session:
    """Rebuild a session from its attempt log.

    Recorded verdicts are trusted rather than recomputed, so a replay is
    cheap and reproduces historic state even if grading behaviour were
    ever tuned; outputs are rebuilt from the recorded payloads by the
    same pure derivation the live path uses.
    """
    session = new_session(workflow, session_id)
    for record in records:
        task = workflow.task(record.task_id)
        session.attempt_counts[task.id] = session.attempt_counts.get(task.id, 0) + 1
        session.log.append(record)
        if record.verdict.get("accepted"):
            session.completed.add(task.id)
            output = _output_for(session, task, record.payload)
            if output is not None:
                session.outputs[task.id] = output
    return session
