"""Problem catalog: candidate checking with witnesses and small-instance
decision oracles.

Seven problems are supported.  VertexCover, DominatingSet and
FeedbackVertexSet ask for at most ``budget`` nodes; Clique and
IndependentSet ask for at least ``budget`` nodes; the two HamCycle
variants take bare graphs and are decided through cycle orders rather
than node subsets.

Cycle convention: an undirected cycle needs three distinct nodes, a
directed cycle two (antiparallel arcs).  Hamiltonian cycles need three
nodes in both variants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations

from reductio.graphs import (
    Graph,
    ProblemInstance,
    canonical_edge,
    is_acyclic,
    remove_nodes,
)


class ProblemError(ValueError):
    """Precondition violation: bad candidate, budget mismatch, bound exceeded."""


class ProblemId(enum.Enum):
    VERTEX_COVER = "vertex-cover"
    DOMINATING_SET = "dominating-set"
    FEEDBACK_VERTEX_SET = "feedback-vertex-set"
    CLIQUE = "clique"
    INDEPENDENT_SET = "independent-set"
    HAM_CYCLE_DIRECTED = "ham-cycle-directed"
    HAM_CYCLE_UNDIRECTED = "ham-cycle-undirected"

    @property
    def requires_budget(self) -> bool:
        return self not in (ProblemId.HAM_CYCLE_DIRECTED, ProblemId.HAM_CYCLE_UNDIRECTED)

    @property
    def directed_input(self) -> bool:
        return self is ProblemId.HAM_CYCLE_DIRECTED

    @property
    def minimizing(self) -> bool:
        """True when the budget bounds the solution from above."""
        return self in (
            ProblemId.VERTEX_COVER,
            ProblemId.DOMINATING_SET,
            ProblemId.FEEDBACK_VERTEX_SET,
        )


def problem_from_wire(text: str) -> ProblemId:
    for p in ProblemId:
        if p.value == text:
            return p
    raise ProblemError(f"unknown problem id {text!r}")


# -- structure predicates --------------------------------------------------

def is_vertex_cover(g: Graph, chosen: frozenset[str]) -> bool:
    return all(a in chosen or b in chosen for a, b in g.edges)


def is_dominating_set(g: Graph, chosen: frozenset[str]) -> bool:
    adj = g.adjacency()
    return all(v in chosen or any(u in chosen for u in adj[v]) for v in g.nodes)


def is_feedback_vertex_set(g: Graph, chosen: frozenset[str]) -> bool:
    return is_acyclic(remove_nodes(g, chosen))


def is_clique(g: Graph, chosen: frozenset[str]) -> bool:
    return all(g.has_edge(a, b) or g.has_edge(b, a) for a, b in combinations(sorted(chosen), 2))


def is_independent_set(g: Graph, chosen: frozenset[str]) -> bool:
    return not any(
        g.has_edge(a, b) or g.has_edge(b, a) for a, b in combinations(sorted(chosen), 2)
    )


# -- witnesses -------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    kind: str
    nodes: tuple[str, ...] = ()
    allowed: int | None = None
    actual: int | None = None


def witness_to_obj(w: Witness) -> dict:
    out: dict = {"kind": w.kind}
    if w.kind == "budget":
        out["allowed"] = w.allowed
        out["actual"] = w.actual
    else:
        out["nodes"] = list(w.nodes)
    return out


@dataclass(frozen=True)
class CandidateVerdict:
    valid: bool
    witness: Witness | None = None

    def __post_init__(self) -> None:
        if self.valid and self.witness is not None:
            raise ValueError("valid verdicts carry no witness")
        if not self.valid and self.witness is None:
            raise ValueError("invalid verdicts need a witness")


def candidate_verdict_to_obj(v: CandidateVerdict) -> dict:
    if v.valid:
        return {"valid": True}
    return {"valid": False, "witness": witness_to_obj(v.witness)}


def least_cycle(g: Graph) -> tuple[str, ...] | None:
    """Lexicographically least simple cycle in canonical form.

    Canonical form starts at the cycle's least node; comparison is plain
    tuple order, so shorter cycles beat their extensions.  Undirected
    cycles need length 3, directed length 2.
    """
    if is_acyclic(g):
        return None
    adj = g.adjacency()
    min_len = 2 if g.directed else 3
    for start in g.nodes:
        path = [start]
        on_path = {start}

        def search() -> tuple[str, ...] | None:
            current = path[-1]
            neighbours = sorted(adj[current])
            # closing beats any extension: the closed path is a strict prefix
            if len(path) >= min_len and start in neighbours:
                return tuple(path)
            for nxt in neighbours:
                if nxt in on_path or nxt < start:
                    continue
                path.append(nxt)
                on_path.add(nxt)
                found = search()
                path.pop()
                on_path.remove(nxt)
                if found is not None:
                    return found
            return None

        hit = search()
        if hit is not None:
            return hit
    return None


def check_instance(p: ProblemId, inst: ProblemInstance) -> None:
    """Raise unless the instance carries the right budget and directedness."""
    if p.requires_budget and inst.budget is None:
        raise ProblemError(f"{p.value} requires a budget")
    if not p.requires_budget and inst.budget is not None:
        raise ProblemError(f"{p.value} takes no budget")
    if inst.graph.directed != p.directed_input:
        want = "directed" if p.directed_input else "undirected"
        raise ProblemError(f"{p.value} requires an {want} graph")


def verify_candidate(
    p: ProblemId, inst: ProblemInstance, candidate: frozenset[str] | set[str]
) -> CandidateVerdict:
    """Check a node subset, returning the least counterevidence on failure.

    Structural witnesses take precedence over budget witnesses.  The two
    HamCycle problems are graded through verify_cycle instead.
    """
    if p in (ProblemId.HAM_CYCLE_DIRECTED, ProblemId.HAM_CYCLE_UNDIRECTED):
        raise ProblemError(f"{p.value} candidates are cycle orders, use verify_cycle")
    check_instance(p, inst)
    chosen = frozenset(candidate)
    stray = chosen - set(inst.graph.nodes)
    if stray:
        raise ProblemError(f"candidate node {sorted(stray)[0]!r} is not in the graph")
    g, k = inst.graph, inst.budget
    assert k is not None

    structural: Witness | None = None
    if p is ProblemId.VERTEX_COVER:
        uncovered = [e for e in sorted(g.edges) if e[0] not in chosen and e[1] not in chosen]
        if uncovered:
            structural = Witness("uncoveredEdge", uncovered[0])
    elif p is ProblemId.DOMINATING_SET:
        adj = g.adjacency()
        missed = [
            v for v in g.nodes if v not in chosen and not any(u in chosen for u in adj[v])
        ]
        if missed:
            structural = Witness("undominatedNode", (missed[0],))
    elif p is ProblemId.FEEDBACK_VERTEX_SET:
        cycle = least_cycle(remove_nodes(g, chosen))
        if cycle is not None:
            structural = Witness("survivingCycle", cycle)
    elif p is ProblemId.CLIQUE:
        missing = [
            (a, b)
            for a, b in combinations(sorted(chosen), 2)
            if not (g.has_edge(a, b) or g.has_edge(b, a))
        ]
        if missing:
            structural = Witness("missingEdgePair", missing[0])
    else:  # independent set
        touching = [
            (a, b)
            for a, b in combinations(sorted(chosen), 2)
            if g.has_edge(a, b) or g.has_edge(b, a)
        ]
        if touching:
            structural = Witness("adjacentSelectedPair", touching[0])

    if structural is not None:
        return CandidateVerdict(False, structural)
    within = len(chosen) <= k if p.minimizing else len(chosen) >= k
    if not within:
        return CandidateVerdict(False, Witness("budget", allowed=k, actual=len(chosen)))
    return CandidateVerdict(True)


def verify_cycle(p: ProblemId, g: Graph, order: list[str] | tuple[str, ...]) -> bool:
    """True iff order is a Hamiltonian cycle of g.

    Total: any malformed order is simply false.  Edge direction is
    enforced when the graph is directed.
    """
    if p not in (ProblemId.HAM_CYCLE_DIRECTED, ProblemId.HAM_CYCLE_UNDIRECTED):
        raise ProblemError(f"{p.value} is not a cycle problem")
    seq = tuple(order)
    if len(seq) != len(g.nodes) or len(seq) < 3:
        return False
    if set(seq) != set(g.nodes) or len(set(seq)) != len(seq):
        return False
    for i, a in enumerate(seq):
        b = seq[(i + 1) % len(seq)]
        if g.directed:
            if (a, b) not in g.edges:
                return False
        elif canonical_edge(False, a, b) not in g.edges:
            return False
    return True


# -- decision oracles ------------------------------------------------------

SUBSET_ORACLE_BOUND = 10
HAM_CYCLE_ORACLE_BOUND = 8

_PREDICATES = {
    ProblemId.VERTEX_COVER: is_vertex_cover,
    ProblemId.DOMINATING_SET: is_dominating_set,
    ProblemId.FEEDBACK_VERTEX_SET: is_feedback_vertex_set,
    ProblemId.CLIQUE: is_clique,
    ProblemId.INDEPENDENT_SET: is_independent_set,
}


@dataclass(frozen=True)
class Decision:
    positive: bool
    solution: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.positive and self.solution is None:
            raise ValueError("positive decisions carry a solution")
        if not self.positive and self.solution is not None:
            raise ValueError("negative decisions carry no solution")


def decision_to_obj(d: Decision) -> dict:
    if d.positive:
        return {"positive": True, "solution": list(d.solution)}
    return {"positive": False}


def _first_ham_cycle(g: Graph) -> tuple[str, ...] | None:
    if len(g.nodes) < 3:
        return None
    adj: dict[str, list[str]] = {v: [] for v in g.nodes}
    for a, b in g.edges:
        adj[a].append(b)
        if not g.directed:
            adj[b].append(a)
    for v in adj:
        adj[v].sort()
    start = g.nodes[0]
    path = [start]
    used = {start}
    total = len(g.nodes)

    def search() -> tuple[str, ...] | None:
        if len(path) == total:
            return tuple(path) if start in adj[path[-1]] else None
        for nxt in adj[path[-1]]:
            if nxt in used:
                continue
            path.append(nxt)
            used.add(nxt)
            found = search()
            path.pop()
            used.remove(nxt)
            if found is not None:
                return found
        return None

    return search()


def decide(p: ProblemId, inst: ProblemInstance) -> Decision:
    """Exhaustive decision with a deterministic first solution.

    Subsets are scanned in ascending size, lexicographic within a size;
    minimizing problems stop at the smallest solution, Clique and
    IndependentSet scan exactly budget-sized subsets.  HamCycle uses
    backtracking from the least node with ascending neighbour order.
    """
    check_instance(p, inst)
    g = inst.graph
    n = len(g.nodes)
    if p.requires_budget:
        if n > SUBSET_ORACLE_BOUND:
            raise ProblemError(
                f"oracle bound exceeded: {n} nodes, limit {SUBSET_ORACLE_BOUND}"
            )
        k = inst.budget
        assert k is not None
        predicate = _PREDICATES[p]
        if p.minimizing:
            for size in range(0, min(k, n) + 1):
                for subset in combinations(g.nodes, size):
                    if predicate(g, frozenset(subset)):
                        return Decision(True, subset)
            return Decision(False)
        if k > n:
            return Decision(False)
        for subset in combinations(g.nodes, k):
            if predicate(g, frozenset(subset)):
                return Decision(True, subset)
        return Decision(False)
    if n > HAM_CYCLE_ORACLE_BOUND:
        raise ProblemError(f"oracle bound exceeded: {n} nodes, limit {HAM_CYCLE_ORACLE_BOUND}")
    cycle = _first_ham_cycle(g)
    if cycle is None:
        return Decision(False)
    return Decision(True, cycle)
