"""Command line tools over the same engine the service uses.

Machine output is JSON on stdout; prose lands on stderr so a grader can
pipe stdout straight into a parser.  Exit codes: 0 for success (decide:
positive, verify: correct, validate: nothing to report), 1 for a
negative, incorrect or flagged result, 2 for usage and input errors.
Outputs are deterministic byte for byte: keys are sorted and verify runs
without a wall-clock budget so the same input always scans the same
instances.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import data
from .graphs import Graph, graph_from_obj, instance_from_obj, instance_to_obj
from .problems import ProblemId, decide, decision_to_obj, problem_from_wire
from .reductions import apply_reduction, spec_from_obj
from .service import ServiceConfig, config_from_obj, run_service
from .verifier import OUTCOME_CORRECT, explain, verdict_to_obj, verify_auto
from .workflows import diagnostic_to_obj, validate_workflow

_EPILOG = f"""\
file formats (JSON):
  graph      {{"directed": bool, "nodes": [id...], "edges": [[u, v]...]}} plus
             optional selectedNodes, highlightedNodes, selectedEdges,
             highlightedEdges mark arrays
  instance   {{"graph": <graph>, "budget": <int, for budgeted problems>}}
  spec       {{"family": "edge"|"node"|"global", "sourceProblem",
             "targetProblem", "paramMap"?, "fixedSourceBudget"?, plus the
             family's gadget keys}}
  workflow   {{"id", "title", "tasks": [...]}}

shipped examples:
  reduction specs: {data.gadgets_dir()}
  workflows:       {data.workflows_dir()}
"""


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(
            f"{path} is not valid JSON (line {exc.lineno}, column {exc.colno})"
        ) from exc


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_dot(g: Graph) -> str:
    """Deterministic DOT text; marks become styling attributes."""
    arrow = "->" if g.directed else "--"
    lines = ["digraph G {" if g.directed else "graph G {"]
    for node in g.nodes:
        attrs = []
        if node in g.selected_nodes:
            attrs.append("style=filled")
        if node in g.highlighted_nodes:
            attrs.append("peripheries=2")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_quote(node)}{suffix};")
    for a, b in sorted(g.edges):
        styles = []
        if (a, b) in g.selected_edges:
            styles.append("bold")
        if (a, b) in g.highlighted_edges:
            styles.append("dashed")
        suffix = f' [style="{",".join(styles)}"]' if styles else ""
        lines.append(f"  {_quote(a)} {arrow} {_quote(b)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    diagnostics = validate_workflow(_load_json(args.workflow))
    _emit({"diagnostics": [diagnostic_to_obj(d) for d in diagnostics]})
    if diagnostics:
        plural = "s" if len(diagnostics) != 1 else ""
        _say(f"{len(diagnostics)} finding{plural}")
        return 1
    _say("ok")
    return 0


def cmd_apply(args) -> int:
    spec = spec_from_obj(_load_json(args.spec))
    source = instance_from_obj(_load_json(args.instance))
    _emit(instance_to_obj(apply_reduction(spec, source)))
    return 0


def cmd_decide(args) -> int:
    problem = problem_from_wire(args.problem)
    instance = instance_from_obj(_load_json(args.instance))
    decision = decide(problem, instance)
    _emit(decision_to_obj(decision))
    if decision.positive:
        names = ", ".join(decision.solution) if decision.solution else "(empty set)"
        _say(f"positive; first solution: {names}")
        return 0
    _say("negative")
    return 1


def cmd_verify(args) -> int:
    spec = spec_from_obj(_load_json(args.spec))
    verdict = verify_auto(spec, args.bound)
    _emit(verdict_to_obj(verdict))
    _say(explain(verdict))
    return 0 if verdict.outcome == OUTCOME_CORRECT else 1


def cmd_render(args) -> int:
    graph = graph_from_obj(_load_json(args.graph))
    sys.stdout.write(render_dot(graph))
    return 0


def cmd_serve(args) -> int:
    config = (
        config_from_obj(_load_json(args.config))
        if args.config is not None
        else ServiceConfig()
    )
    run_service(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reductio",
        description="Validate, apply and verify gadget reductions; "
        "run the exercise service.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser(
        "validate", help="check a workflow file, report diagnostics"
    )
    validate.add_argument("workflow", help="workflow JSON file")
    validate.set_defaults(func=cmd_validate)

    apply_cmd = sub.add_parser("apply", help="build the target instance")
    apply_cmd.add_argument("--spec", required=True, help="reduction spec JSON file")
    apply_cmd.add_argument("--instance", required=True, help="source instance file")
    apply_cmd.set_defaults(func=cmd_apply)

    decide_cmd = sub.add_parser(
        "decide", help="decide a small instance by exhaustive search"
    )
    decide_cmd.add_argument(
        "--problem",
        required=True,
        choices=[p.value for p in ProblemId],
        help="problem id",
    )
    decide_cmd.add_argument("--instance", required=True, help="instance JSON file")
    decide_cmd.set_defaults(func=cmd_decide)

    verify = sub.add_parser(
        "verify", help="verify a reduction spec, searching up to --bound nodes"
    )
    verify.add_argument("--spec", required=True, help="reduction spec JSON file")
    verify.add_argument(
        "--bound",
        type=int,
        default=None,
        help="search all sources up to this many nodes "
        "(default: exact characterization where available, "
        "otherwise the family's default bound)",
    )
    verify.set_defaults(func=cmd_verify)

    render = sub.add_parser("render", help="render a graph as DOT")
    render.add_argument("--graph", required=True, help="graph JSON file")
    render.set_defaults(func=cmd_render)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument(
        "--config",
        default=None,
        help="service config JSON file (REDUCTIO_* environment "
        "variables override individual fields)",
    )
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
