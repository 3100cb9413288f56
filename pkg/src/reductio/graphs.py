"""Finite labeled graphs with selection/highlight marks.

The JSON wire format is the contract shared by every other module and by the
web client:

    {"directed": false,
     "nodes": ["a", "b"],
     "edges": [["a", "b"]],
     "selectedNodes": ["a"],
     "highlightedNodes": [],
     "selectedEdges": [],
     "highlightedEdges": []}

The four mark keys are optional.  Unknown keys are rejected.  Undirected edges
are stored with lexicographically ordered endpoints; canonical serialization
sorts nodes and edges, so serialize(parse(text)) == text on canonical input
and parse(serialize(g)) == g for every Graph value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Raised for malformed graph text or violated structural invariants."""


def canonical_edge(directed: bool, a: str, b: str) -> tuple[str, str]:
    if directed:
        return (a, b)
    return (a, b) if a <= b else (b, a)


def _as_marks(value: Iterable[str] | None) -> frozenset[str]:
    return frozenset(value) if value is not None else frozenset()


@dataclass(frozen=True)
class Graph:
    """An immutable simple graph (no self-loops, no duplicate edges).

    ``nodes`` is kept sorted; ``edges`` holds canonical endpoint tuples.
    Selected/highlighted node and edge sets must reference declared elements.
    """

    directed: bool
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    selected_nodes: frozenset[str] = field(default=frozenset())
    highlighted_nodes: frozenset[str] = field(default=frozenset())
    selected_edges: frozenset[tuple[str, str]] = field(default=frozenset())
    highlighted_edges: frozenset[tuple[str, str]] = field(default=frozenset())

    def __init__(
        self,
        directed: bool,
        nodes: Iterable[str],
        edges: Iterable[tuple[str, str]] = (),
        selected_nodes: Iterable[str] | None = None,
        highlighted_nodes: Iterable[str] | None = None,
        selected_edges: Iterable[tuple[str, str]] | None = None,
        highlighted_edges: Iterable[tuple[str, str]] | None = None,
    ) -> None:
        node_tuple = tuple(sorted(nodes))
        node_set = set(node_tuple)
        if len(node_set) != len(node_tuple):
            raise GraphError("duplicate node id")
        for name in node_tuple:
            if not isinstance(name, str) or not name:
                raise GraphError("node ids must be nonempty strings")
        edge_set: set[tuple[str, str]] = set()
        for a, b in edges:
            if a == b:
                raise GraphError(f"self-loop on node {a!r}")
            if a not in node_set or b not in node_set:
                missing = a if a not in node_set else b
                raise GraphError(f"edge endpoint {missing!r} is not a declared node")
            edge_set.add(canonical_edge(directed, a, b))
        object.__setattr__(self, "directed", bool(directed))
        object.__setattr__(self, "nodes", node_tuple)
        object.__setattr__(self, "edges", frozenset(edge_set))
        object.__setattr__(self, "selected_nodes", _as_marks(selected_nodes))
        object.__setattr__(self, "highlighted_nodes", _as_marks(highlighted_nodes))
        sel_e = frozenset(canonical_edge(directed, a, b) for a, b in (selected_edges or ()))
        high_e = frozenset(canonical_edge(directed, a, b) for a, b in (highlighted_edges or ()))
        object.__setattr__(self, "selected_edges", sel_e)
        object.__setattr__(self, "highlighted_edges", high_e)
        for label, marks in (("selectedNodes", self.selected_nodes),
                             ("highlightedNodes", self.highlighted_nodes)):
            extra = marks - node_set
            if extra:
                raise GraphError(f"{label} entry {sorted(extra)[0]!r} is not a declared node")
        for label, marks in (("selectedEdges", sel_e), ("highlightedEdges", high_e)):
            extra = marks - self.edges
            if extra:
                a, b = sorted(extra)[0]
                raise GraphError(f"{label} entry [{a!r}, {b!r}] is not a declared edge")

    # -- structure helpers -------------------------------------------------

    def has_edge(self, a: str, b: str) -> bool:
        return canonical_edge(self.directed, a, b) in self.edges

    def adjacency(self) -> dict[str, frozenset[str]]:
        """Neighbor map; for directed graphs these are out-neighbors."""
        out: dict[str, set[str]] = {v: set() for v in self.nodes}
        for a, b in self.edges:
            out[a].add(b)
            if not self.directed:
                out[b].add(a)
        return {v: frozenset(ns) for v, ns in out.items()}

    def degree_signature(self) -> dict[str, tuple[int, ...]]:
        if not self.directed:
            deg = {v: 0 for v in self.nodes}
            for a, b in self.edges:
                deg[a] += 1
                deg[b] += 1
            return {v: (d,) for v, d in deg.items()}
        outd = {v: 0 for v in self.nodes}
        ind = {v: 0 for v in self.nodes}
        for a, b in self.edges:
            outd[a] += 1
            ind[b] += 1
        return {v: (outd[v], ind[v]) for v in self.nodes}


# -- JSON wire format ------------------------------------------------------

_REQUIRED_KEYS = ("directed", "nodes", "edges")
_OPTIONAL_KEYS = ("selectedNodes", "highlightedNodes", "selectedEdges", "highlightedEdges")


def _check_edge_entry(entry: object, key: str) -> tuple[str, str]:
    if (not isinstance(entry, list) or len(entry) != 2
            or not all(isinstance(x, str) for x in entry)):
        raise GraphError(f"{key} entries must be two-element arrays of node ids")
    return (entry[0], entry[1])


def graph_from_obj(obj: object) -> Graph:
    """Build a Graph from decoded JSON, rejecting unknown keys and bad shapes."""
    if not isinstance(obj, dict):
        raise GraphError("graph must be a JSON object")
    unknown = set(obj) - set(_REQUIRED_KEYS) - set(_OPTIONAL_KEYS)
    if unknown:
        raise GraphError(f"unknown key {sorted(unknown)[0]!r}")
    for key in _REQUIRED_KEYS:
        if key not in obj:
            raise GraphError(f"missing required key {key!r}")
    if not isinstance(obj["directed"], bool):
        raise GraphError("directed must be a boolean")
    if not isinstance(obj["nodes"], list) or not all(isinstance(n, str) for n in obj["nodes"]):
        raise GraphError("nodes must be an array of strings")
    if not isinstance(obj["edges"], list):
        raise GraphError("edges must be an array")
    directed = obj["directed"]
    edges = [_check_edge_entry(e, "edges") for e in obj["edges"]]
    seen: set[tuple[str, str]] = set()
    for a, b in edges:
        canon = canonical_edge(directed, a, b)
        if canon in seen:
            raise GraphError(f"duplicate edge [{a!r}, {b!r}]")
        seen.add(canon)
    marks: dict[str, list] = {}
    for key in _OPTIONAL_KEYS:
        if key in obj:
            if not isinstance(obj[key], list):
                raise GraphError(f"{key} must be an array")
            marks[key] = obj[key]
    for key in ("selectedNodes", "highlightedNodes"):
        if key in marks and not all(isinstance(n, str) for n in marks[key]):
            raise GraphError(f"{key} must be an array of node ids")
    sel_edges = [_check_edge_entry(e, "selectedEdges") for e in marks.get("selectedEdges", [])]
    high_edges = [_check_edge_entry(e, "highlightedEdges") for e in marks.get("highlightedEdges", [])]
    return Graph(
        directed=directed,
        nodes=obj["nodes"],
        edges=edges,
        selected_nodes=marks.get("selectedNodes"),
        highlighted_nodes=marks.get("highlightedNodes"),
        selected_edges=sel_edges if "selectedEdges" in marks else None,
        highlighted_edges=high_edges if "highlightedEdges" in marks else None,
    )


def parse_graph(text: str | bytes) -> Graph:
    """Parse graph JSON.  Syntax errors report line and column."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return graph_from_obj(obj)


def graph_to_obj(g: Graph) -> dict:
    """Canonical JSON object: sorted nodes/edges, empty mark keys omitted."""
    obj: dict = {
        "directed": g.directed,
        "nodes": list(g.nodes),
        "edges": [list(e) for e in sorted(g.edges)],
    }
    if g.selected_nodes:
        obj["selectedNodes"] = sorted(g.selected_nodes)
    if g.highlighted_nodes:
        obj["highlightedNodes"] = sorted(g.highlighted_nodes)
    if g.selected_edges:
        obj["selectedEdges"] = [list(e) for e in sorted(g.selected_edges)]
    if g.highlighted_edges:
        obj["highlightedEdges"] = [list(e) for e in sorted(g.highlighted_edges)]
    return obj


def serialize_graph(g: Graph) -> str:
    return json.dumps(graph_to_obj(g))


# -- basic algorithms ------------------------------------------------------

def is_acyclic(g: Graph) -> bool:
    """Cycle-freeness.  A directed 2-cycle u->v->u counts as a cycle; an
    undirected cycle needs 3 distinct nodes (a single edge is acyclic)."""
    if not g.directed:
        parent = {v: v for v in g.nodes}

        def find(v: str) -> str:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a, b in g.edges:
            ra, rb = find(a), find(b)
            if ra == rb:
                return False
            parent[ra] = rb
        return True
    adj = g.adjacency()
    state = {v: 0 for v in g.nodes}  # 0 new, 1 on stack, 2 done
    for root in g.nodes:
        if state[root]:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(sorted(adj[root])))]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if state[nxt] == 1:
                    return False
                if state[nxt] == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(sorted(adj[nxt]))))
                    advanced = True
                    break
            if not advanced:
                state[node] = 2
                stack.pop()
    return True


def remove_nodes(g: Graph, victims: Iterable[str]) -> Graph:
    """Induced subgraph after deleting ``victims`` (marks filtered too)."""
    gone = set(victims)
    unknown = gone - set(g.nodes)
    if unknown:
        raise GraphError(f"cannot remove unknown node {sorted(unknown)[0]!r}")
    keep = [v for v in g.nodes if v not in gone]
    kept_edges = [e for e in g.edges if e[0] not in gone and e[1] not in gone]
    return Graph(
        directed=g.directed,
        nodes=keep,
        edges=kept_edges,
        selected_nodes=g.selected_nodes - gone,
        highlighted_nodes=g.highlighted_nodes - gone,
        selected_edges=[e for e in g.selected_edges if e in kept_edges],
        highlighted_edges=[e for e in g.highlighted_edges if e in kept_edges],
    )


def isomorphic(g1: Graph, g2: Graph, respect_marks: bool = False) -> dict[str, str] | None:
    """Structure-preserving bijection, or None.

    Deterministic: returns the lexicographically least witnessing bijection,
    ordering bijections by the image tuple of g1's sorted nodes.  With
    ``respect_marks`` the bijection must also preserve membership in all four
    mark sets.  Comparing a directed with an undirected graph is an error.
    """
    if g1.directed != g2.directed:
        raise GraphError("cannot compare directed with undirected graph")
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return None
    sig1 = g1.degree_signature()
    sig2 = g2.degree_signature()
    if sorted(sig1.values()) != sorted(sig2.values()):
        return None
    if respect_marks:
        if (len(g1.selected_nodes) != len(g2.selected_nodes)
                or len(g1.highlighted_nodes) != len(g2.highlighted_nodes)
                or len(g1.selected_edges) != len(g2.selected_edges)
                or len(g1.highlighted_edges) != len(g2.highlighted_edges)):
            return None

    order = list(g1.nodes)
    candidates = list(g2.nodes)
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def node_compatible(v: str, w: str) -> bool:
        if sig1[v] != sig2[w]:
            return False
        if respect_marks:
            if (v in g1.selected_nodes) != (w in g2.selected_nodes):
                return False
            if (v in g1.highlighted_nodes) != (w in g2.highlighted_nodes):
                return False
        return True

    def pair_consistent(v: str, w: str) -> bool:
        # For directed graphs both orientations are distinct edges; for
        # undirected the second pass hits the same canonical edge (harmless).
        for prev, img in mapping.items():
            for x, y, fx, fy in ((v, prev, w, img), (prev, v, img, w)):
                e1 = canonical_edge(g1.directed, x, y)
                e2 = canonical_edge(g2.directed, fx, fy)
                if (e1 in g1.edges) != (e2 in g2.edges):
                    return False
                if e1 in g1.edges and respect_marks:
                    if (e1 in g1.selected_edges) != (e2 in g2.selected_edges):
                        return False
                    if (e1 in g1.highlighted_edges) != (e2 in g2.highlighted_edges):
                        return False
        return True

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        for w in candidates:
            if w in used or not node_compatible(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if pair_consistent(v, w) and extend(pos + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return dict(mapping) if extend(0) else None


def to_dot(g: Graph) -> str:
    """Graphviz export; selected elements are filled, highlighted are bold."""
    kind, arrow = ("digraph", "->") if g.directed else ("graph", "--")
    lines = [f"{kind} G {{"]
    for v in g.nodes:
        styles = []
        if v in g.selected_nodes:
            styles.append("filled")
        if v in g.highlighted_nodes:
            styles.append("bold")
        attr = f' [style="{",".join(styles)}"]' if styles else ""
        lines.append(f'  "{v}"{attr};')
    for a, b in sorted(g.edges):
        styles = []
        if (a, b) in g.selected_edges:
            styles.append("filled")
        if (a, b) in g.highlighted_edges:
            styles.append("bold")
        attr = f' [style="{",".join(styles)}"]' if styles else ""
        lines.append(f'  "{a}" {arrow} "{b}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- problem instances and enumeration ------------------------------------

@dataclass(frozen=True)
class ProblemInstance:
    """A graph together with an optional nonnegative budget.

    The budget may exceed the node count; that is permitted, just never
    produced by the enumerator.
    """

    graph: Graph
    budget: int | None = None

    def __post_init__(self) -> None:
        if self.budget is not None:
            if not isinstance(self.budget, int) or isinstance(self.budget, bool) or self.budget < 0:
                raise GraphError("budget must be a nonnegative integer")


def instance_from_obj(obj: object) -> ProblemInstance:
    if not isinstance(obj, dict):
        raise GraphError("instance must be a JSON object")
    unknown = set(obj) - {"graph", "budget"}
    if unknown:
        raise GraphError(f"unknown key {sorted(unknown)[0]!r}")
    if "graph" not in obj:
        raise GraphError("missing required key 'graph'")
    budget = obj.get("budget")
    if budget is not None and (not isinstance(budget, int) or isinstance(budget, bool)):
        raise GraphError("budget must be a nonnegative integer")
    return ProblemInstance(graph=graph_from_obj(obj["graph"]), budget=budget)


def parse_instance(text: str | bytes) -> ProblemInstance:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return instance_from_obj(obj)


def instance_to_obj(inst: ProblemInstance) -> dict:
    obj: dict = {"graph": graph_to_obj(inst.graph)}
    if inst.budget is not None:
        obj["budget"] = inst.budget
    return obj


def serialize_instance(inst: ProblemInstance) -> str:
    return json.dumps(instance_to_obj(inst))


GRAPH_ONLY = "graph-only"
GRAPH_AND_BUDGET = "graph-and-budget"


def node_pairs(directed: bool, names: list[str]) -> list[tuple[str, str]]:
    """The fixed pair universe: lexicographic, unordered pairs a<b when
    undirected, all ordered pairs a!=b when directed."""
    if directed:
        return [(a, b) for a in names for b in names if a != b]
    return [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]


def enumerate_instances(arity: str, directed: bool, max_nodes: int) -> Iterator[ProblemInstance]:
    """All labeled instances on nodes v1..vn for n = 1..max_nodes.

    Order is fixed: ascending node count, then edge subsets by ascending
    bitmask (bit i = i-th pair of the lexicographic pair list), then budget
    k = 0..n when the arity includes one.  Streams lazily.
    """
    if arity not in (GRAPH_ONLY, GRAPH_AND_BUDGET):
        raise GraphError(f"unknown instance arity {arity!r}")
    if max_nodes < 1:
        raise GraphError("max_nodes must be at least 1")
    for n in range(1, max_nodes + 1):
        names = [f"v{i}" for i in range(1, n + 1)]
        pairs = node_pairs(directed, names)
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            g = Graph(directed=directed, nodes=names, edges=edges)
            if arity == GRAPH_ONLY:
                yield ProblemInstance(graph=g)
            else:
                for k in range(n + 1):
                    yield ProblemInstance(graph=g, budget=k)
