"""Gadget reductions: edge, node, and global substitution families.

A reduction is described declaratively by a gadget (or two, for the edge
family with a non-edge gadget), a source and target problem, and an affine
parameter map k' = alpha*k + beta*|V| + gamma*|E| + delta (clamped at 0).
Application is deterministic: processed pairs are taken in lexicographic
order, fresh nodes are named "g@u|v" (edge family), "g@v" (node family)
or "g@global", and any collision with source names is rejected.

Family shapes:

* edge — per source edge {u, v} with u < v, instantiate the edge gadget
  identifying terminalU with u and terminalV with v; with a non-edge
  gadget present, non-adjacent pairs get that gadget likewise.  Without a
  non-edge gadget, source nodes on no edge do not appear in the target;
  with one, every source node is kept (a 1-node source has no pairs but
  still maps to a 1-node target).
* node — directed sources only.  Every source node v becomes a fresh copy
  of the body; every arc (u, v) becomes the undirected edge
  {portOut@u, portIn@v}.  The target is undirected.
* global — the source graph plus one body copy; body nodes with policy
  ALL are connected to every source node (both arc directions when the
  graphs are directed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from reductio.graphs import (
    Graph,
    ProblemInstance,
    graph_from_obj,
    graph_to_obj,
    instance_to_obj,
    serialize_instance,
)
from reductio.problems import ProblemId, check_instance, problem_from_wire, verify_candidate


class ReductionError(ValueError):
    """Malformed gadget or spec, name collision, or precondition violation."""


POLICY_ALL = "ALL"
POLICY_NONE = "NONE"


@dataclass(frozen=True)
class EdgeGadget:
    body: Graph
    terminal_u: str
    terminal_v: str

    def __post_init__(self) -> None:
        if self.body.directed:
            raise ReductionError("edge gadget body must be undirected")
        if len(self.body.nodes) < 2:
            raise ReductionError("edge gadget body needs at least 2 nodes")
        for t in (self.terminal_u, self.terminal_v):
            if t not in self.body.nodes:
                raise ReductionError(f"terminal {t!r} is not a body node")
        if self.terminal_u == self.terminal_v:
            raise ReductionError("terminals must differ")


@dataclass(frozen=True)
class NodeGadget:
    body: Graph
    port_in: str
    port_out: str

    def __post_init__(self) -> None:
        if self.body.directed:
            raise ReductionError("node gadget body must be undirected")
        for p in (self.port_in, self.port_out):
            if p not in self.body.nodes:
                raise ReductionError(f"port {p!r} is not a body node")


@dataclass(frozen=True)
class GlobalGadget:
    body: Graph
    policy: tuple[tuple[str, str], ...]  # (bodyNode, ALL|NONE), sorted

    def __init__(self, body: Graph, policy) -> None:
        object.__setattr__(self, "body", body)
        mapping = dict(policy)
        if set(mapping) != set(body.nodes):
            raise ReductionError("policy must cover exactly the body nodes")
        for node, rule in mapping.items():
            if rule not in (POLICY_ALL, POLICY_NONE):
                raise ReductionError(f"policy for {node!r} must be ALL or NONE")
        object.__setattr__(self, "policy", tuple(sorted(mapping.items())))

    def rule(self, node: str) -> str:
        return dict(self.policy)[node]


@dataclass(frozen=True)
class ParamMap:
    alpha: int = 1
    beta: int = 0
    gamma: int = 0
    delta: int = 0

    def __post_init__(self) -> None:
        for value in (self.alpha, self.beta, self.gamma, self.delta):
            if not isinstance(value, int) or isinstance(value, bool):
                raise ReductionError("parameter map coefficients must be integers")

    def apply(self, k: int, nodes: int, edges: int) -> int:
        return max(0, self.alpha * k + self.beta * nodes + self.gamma * edges + self.delta)


IDENTITY_MAP = ParamMap(1, 0, 0, 0)

EDGE_FAMILY = "edge"
NODE_FAMILY = "node"
GLOBAL_FAMILY = "global"


@dataclass(frozen=True)
class ReductionSpec:
    family: str
    source_problem: ProblemId
    target_problem: ProblemId
    edge_gadget: EdgeGadget | None = None
    non_edge_gadget: EdgeGadget | None = None
    node_gadget: NodeGadget | None = None
    global_gadget: GlobalGadget | None = None
    param_map: ParamMap | None = None
    fixed_source_budget: int | None = None

    def __post_init__(self) -> None:
        src, tgt = self.source_problem, self.target_problem
        if self.family == EDGE_FAMILY:
            if self.edge_gadget is None:
                raise ReductionError("edge family requires an edge gadget")
            if self.node_gadget or self.global_gadget:
                raise ReductionError("edge family takes only edge gadgets")
            if src.directed_input or tgt.directed_input:
                raise ReductionError("edge family works on undirected problems")
        elif self.family == NODE_FAMILY:
            if self.node_gadget is None:
                raise ReductionError("node family requires a node gadget")
            if self.edge_gadget or self.non_edge_gadget or self.global_gadget:
                raise ReductionError("node family takes only a node gadget")
            if not src.directed_input:
                raise ReductionError("node family requires a directed source problem")
            if tgt.directed_input:
                raise ReductionError("node family produces an undirected target")
        elif self.family == GLOBAL_FAMILY:
            if self.global_gadget is None:
                raise ReductionError("global family requires a global gadget")
            if self.edge_gadget or self.non_edge_gadget or self.node_gadget:
                raise ReductionError("global family takes only a global gadget")
            if src.directed_input != tgt.directed_input:
                raise ReductionError("global family keeps the source directedness")
            if self.global_gadget.body.directed != src.directed_input:
                raise ReductionError("global gadget body directedness must match the source")
        else:
            raise ReductionError(f"unknown family {self.family!r}")
        if tgt.requires_budget:
            if self.param_map is None:
                object.__setattr__(self, "param_map", IDENTITY_MAP)
        elif self.param_map is not None:
            raise ReductionError(f"{tgt.value} takes no budget, drop the parameter map")
        if self.fixed_source_budget is not None:
            if not src.requires_budget:
                raise ReductionError(f"{src.value} takes no budget, drop fixedSourceBudget")
            bad = not isinstance(self.fixed_source_budget, int) or isinstance(
                self.fixed_source_budget, bool
            )
            if bad or self.fixed_source_budget < 0:
                raise ReductionError("fixedSourceBudget must be a nonnegative integer")


def _fresh(names: list[str], seen: dict[str, str], label: str) -> None:
    """Track generated names; duplicates mean the naming scheme collided."""
    for name in names:
        if name in seen:
            raise ReductionError(
                f"name collision: {name!r} produced by both {seen[name]} and {label}"
            )
        seen[name] = label


def _edge_target(spec: ReductionSpec, g: Graph) -> Graph:
    edge_pairs = sorted(g.edges)
    non_pairs = []
    if spec.non_edge_gadget is not None:
        non_pairs = [
            (a, b)
            for i, a in enumerate(g.nodes)
            for b in g.nodes[i + 1 :]
            if (a, b) not in g.edges
        ]
    kept_sources = sorted(
        set(g.nodes)
        if spec.non_edge_gadget is not None
        else {x for pair in edge_pairs for x in pair}
    )
    seen = {name: "the source graph" for name in kept_sources}
    nodes = list(kept_sources)
    edges: set[tuple[str, str]] = set()
    for pairs, gadget in ((edge_pairs, spec.edge_gadget), (non_pairs, spec.non_edge_gadget)):
        for u, v in pairs:
            mapping = {gadget.terminal_u: u, gadget.terminal_v: v}
            fresh = []
            for b in gadget.body.nodes:
                if b in (gadget.terminal_u, gadget.terminal_v):
                    continue
                mapping[b] = f"{b}@{u}|{v}"
                fresh.append(mapping[b])
            _fresh(fresh, seen, f"the gadget copy for ({u}, {v})")
            nodes.extend(fresh)
            for a, b in gadget.body.edges:
                x, y = mapping[a], mapping[b]
                edges.add((x, y) if x < y else (y, x))
    return Graph(False, nodes, sorted(edges))


def _node_target(spec: ReductionSpec, g: Graph) -> Graph:
    gadget = spec.node_gadget
    seen: dict[str, str] = {}
    nodes: list[str] = []
    edges: set[tuple[str, str]] = set()
    for v in g.nodes:
        fresh = [f"{b}@{v}" for b in gadget.body.nodes]
        _fresh(fresh, seen, f"the gadget copy for {v}")
        nodes.extend(fresh)
        for a, b in gadget.body.edges:
            x, y = f"{a}@{v}", f"{b}@{v}"
            edges.add((x, y) if x < y else (y, x))
    for u, v in sorted(g.edges):
        x, y = f"{gadget.port_out}@{u}", f"{gadget.port_in}@{v}"
        if x == y:
            raise ReductionError(f"arc ({u}, {v}) connects a port to itself")
        edges.add((x, y) if x < y else (y, x))
    return Graph(False, nodes, sorted(edges))


def _global_target(spec: ReductionSpec, g: Graph) -> Graph:
    gadget = spec.global_gadget
    seen = {name: "the source graph" for name in g.nodes}
    fresh = {b: f"{b}@global" for b in gadget.body.nodes}
    _fresh(list(fresh.values()), seen, "the global gadget")
    nodes = list(g.nodes) + sorted(fresh.values())
    edges: set[tuple[str, str]] = set()
    for a, b in g.edges:
        edges.add((a, b))
    for a, b in gadget.body.edges:
        x, y = fresh[a], fresh[b]
        if g.directed:
            edges.add((x, y))
        else:
            edges.add((x, y) if x < y else (y, x))
    for b in gadget.body.nodes:
        if gadget.rule(b) != POLICY_ALL:
            continue
        for s in g.nodes:
            if g.directed:
                edges.add((fresh[b], s))
                edges.add((s, fresh[b]))
            else:
                x, y = fresh[b], s
                edges.add((x, y) if x < y else (y, x))
    return Graph(g.directed, nodes, sorted(edges))


def apply_reduction(spec: ReductionSpec, src: ProblemInstance) -> ProblemInstance:
    """Build the target instance for a source instance."""
    check_instance(spec.source_problem, src)
    g = src.graph
    if spec.family == EDGE_FAMILY:
        target = _edge_target(spec, g)
    elif spec.family == NODE_FAMILY:
        target = _node_target(spec, g)
    else:
        target = _global_target(spec, g)
    if not spec.target_problem.requires_budget:
        return ProblemInstance(target)
    budget = spec.param_map.apply(
        src.budget if src.budget is not None else 0, len(g.nodes), len(g.edges)
    )
    return ProblemInstance(target, budget)


def transfer_solution(
    spec: ReductionSpec, src: ProblemInstance, src_solution: frozenset[str] | set[str]
) -> tuple[str, ...]:
    """Embed a valid source solution into the target (not necessarily a
    valid target solution; finishing it is the exercise).

    Edge and global families keep node names; the node family carries v to
    portIn@v.  The source solution must pass verify_candidate first.
    """
    verdict = verify_candidate(spec.source_problem, src, src_solution)
    if not verdict.valid:
        raise ReductionError(f"invalid source solution: {verdict.witness.kind}")
    target = apply_reduction(spec, src)
    if spec.family == NODE_FAMILY:
        return tuple(sorted(f"{spec.node_gadget.port_in}@{v}" for v in src_solution))
    missing = sorted(set(src_solution) - set(target.graph.nodes))
    if missing:
        raise ReductionError(f"node {missing[0]!r} absent from target")
    return tuple(sorted(src_solution))


# -- wire format -----------------------------------------------------------

def _edge_gadget_from_obj(obj, label: str) -> EdgeGadget:
    if not isinstance(obj, dict):
        raise ReductionError(f"{label} must be a JSON object")
    unknown = set(obj) - {"body", "terminalU", "terminalV"}
    if unknown:
        raise ReductionError(f"unknown key {sorted(unknown)[0]!r} in {label}")
    for key in ("body", "terminalU", "terminalV"):
        if key not in obj:
            raise ReductionError(f"missing required key {key!r} in {label}")
    return EdgeGadget(graph_from_obj(obj["body"]), obj["terminalU"], obj["terminalV"])


def _node_gadget_from_obj(obj) -> NodeGadget:
    if not isinstance(obj, dict):
        raise ReductionError("nodeGadget must be a JSON object")
    unknown = set(obj) - {"body", "portIn", "portOut"}
    if unknown:
        raise ReductionError(f"unknown key {sorted(unknown)[0]!r} in nodeGadget")
    for key in ("body", "portIn", "portOut"):
        if key not in obj:
            raise ReductionError(f"missing required key {key!r} in nodeGadget")
    return NodeGadget(graph_from_obj(obj["body"]), obj["portIn"], obj["portOut"])


def _global_gadget_from_obj(obj) -> GlobalGadget:
    if not isinstance(obj, dict):
        raise ReductionError("globalGadget must be a JSON object")
    unknown = set(obj) - {"body", "policy"}
    if unknown:
        raise ReductionError(f"unknown key {sorted(unknown)[0]!r} in globalGadget")
    for key in ("body", "policy"):
        if key not in obj:
            raise ReductionError(f"missing required key {key!r} in globalGadget")
    if not isinstance(obj["policy"], dict):
        raise ReductionError("policy must be an object mapping body nodes to ALL or NONE")
    return GlobalGadget(graph_from_obj(obj["body"]), obj["policy"])


_FAMILY_GADGET_KEYS = {
    EDGE_FAMILY: {"edgeGadget", "nonEdgeGadget"},
    NODE_FAMILY: {"nodeGadget"},
    GLOBAL_FAMILY: {"globalGadget"},
}


def spec_from_obj(obj) -> ReductionSpec:
    if not isinstance(obj, dict):
        raise ReductionError("reduction spec must be a JSON object")
    family = obj.get("family")
    if family not in _FAMILY_GADGET_KEYS:
        raise ReductionError(f"unknown family {family!r}")
    allowed = {"family", "sourceProblem", "targetProblem", "paramMap", "fixedSourceBudget"}
    allowed |= _FAMILY_GADGET_KEYS[family]
    unknown = set(obj) - allowed
    if unknown:
        raise ReductionError(f"unknown key {sorted(unknown)[0]!r}")
    for key in ("sourceProblem", "targetProblem"):
        if key not in obj:
            raise ReductionError(f"missing required key {key!r}")
    param_map = None
    if "paramMap" in obj:
        raw = obj["paramMap"]
        if not isinstance(raw, list) or len(raw) != 4:
            raise ReductionError("paramMap must be an array of four integers")
        param_map = ParamMap(*raw)
    kwargs = {}
    if family == EDGE_FAMILY:
        if "edgeGadget" not in obj:
            raise ReductionError("missing required key 'edgeGadget'")
        kwargs["edge_gadget"] = _edge_gadget_from_obj(obj["edgeGadget"], "edgeGadget")
        if "nonEdgeGadget" in obj:
            kwargs["non_edge_gadget"] = _edge_gadget_from_obj(
                obj["nonEdgeGadget"], "nonEdgeGadget"
            )
    elif family == NODE_FAMILY:
        if "nodeGadget" not in obj:
            raise ReductionError("missing required key 'nodeGadget'")
        kwargs["node_gadget"] = _node_gadget_from_obj(obj["nodeGadget"])
    else:
        if "globalGadget" not in obj:
            raise ReductionError("missing required key 'globalGadget'")
        kwargs["global_gadget"] = _global_gadget_from_obj(obj["globalGadget"])
    return ReductionSpec(
        family=family,
        source_problem=problem_from_wire(obj["sourceProblem"]),
        target_problem=problem_from_wire(obj["targetProblem"]),
        param_map=param_map,
        fixed_source_budget=obj.get("fixedSourceBudget"),
        **kwargs,
    )


def spec_to_obj(spec: ReductionSpec) -> dict:
    out: dict = {
        "family": spec.family,
        "sourceProblem": spec.source_problem.value,
        "targetProblem": spec.target_problem.value,
    }
    if spec.family == EDGE_FAMILY:
        out["edgeGadget"] = {
            "body": graph_to_obj(spec.edge_gadget.body),
            "terminalU": spec.edge_gadget.terminal_u,
            "terminalV": spec.edge_gadget.terminal_v,
        }
        if spec.non_edge_gadget is not None:
            out["nonEdgeGadget"] = {
                "body": graph_to_obj(spec.non_edge_gadget.body),
                "terminalU": spec.non_edge_gadget.terminal_u,
                "terminalV": spec.non_edge_gadget.terminal_v,
            }
    elif spec.family == NODE_FAMILY:
        out["nodeGadget"] = {
            "body": graph_to_obj(spec.node_gadget.body),
            "portIn": spec.node_gadget.port_in,
            "portOut": spec.node_gadget.port_out,
        }
    else:
        out["globalGadget"] = {
            "body": graph_to_obj(spec.global_gadget.body),
            "policy": dict(spec.global_gadget.policy),
        }
    if spec.param_map is not None:
        pm = spec.param_map
        out["paramMap"] = [pm.alpha, pm.beta, pm.gamma, pm.delta]
    if spec.fixed_source_budget is not None:
        out["fixedSourceBudget"] = spec.fixed_source_budget
    return out


def parse_spec(text: str) -> ReductionSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReductionError(f"invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    return spec_from_obj(obj)


def serialize_spec(spec: ReductionSpec) -> str:
    return json.dumps(spec_to_obj(spec))


def serialize_application(spec: ReductionSpec, src: ProblemInstance) -> str:
    """Canonical JSON of the applied reduction, for determinism checks."""
    return serialize_instance(apply_reduction(spec, src))


def instance_pair_obj(spec: ReductionSpec, src: ProblemInstance) -> dict:
    return {
        "source": instance_to_obj(src),
        "target": instance_to_obj(apply_reduction(spec, src)),
    }
