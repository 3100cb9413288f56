"""Reduction verification: gadget characterization and counterexample search.

Two complementary methods.  For the vertex cover to feedback vertex set
edge reduction there is an exact structural test on the gadget alone:
the reduction is correct for every instance iff the gadget body contains
a cycle and removing either terminal leaves it acyclic.  For every
supported reduction there is a bounded search that enumerates source
instances in the fixed order of enumerate_instances, applies the
reduction, and compares the two decisions; the first disagreement is
reported as a counterexample, with solutions attached as evidence.  A
search that finds nothing is only ever reported as correct up to its
bound, never as a proof.

Performance notes.  Decisions are computed through the threshold solvers
(one optimisation number settles every budget), and thresholds are
cached per isomorphism class when the target construction is provably
label independent: always for the node and global families, and for the
edge family exactly when each gadget body admits an automorphism that
swaps the terminals (the construction orients every source pair by name
order, so without that symmetry isomorphic sources can yield genuinely
different targets, and the scan falls back to evaluating every labeled
graph).  When the target problem is feedback vertex set the symmetry
test runs on the body's cycle-relevant core, nodes of degree at most one
never matter there.  Neither caching strategy skips an instance, so the
first counterexample is independent of the mode.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from .graphs import (
    Graph,
    ProblemInstance,
    instance_to_obj,
    is_acyclic,
    remove_nodes,
    isomorphic,
)
from .problems import (
    HAM_CYCLE_ORACLE_BOUND,
    SUBSET_ORACLE_BOUND,
    ProblemId,
    decide,
)
from .reductions import (
    EDGE_FAMILY,
    GLOBAL_FAMILY,
    IDENTITY_MAP,
    NODE_FAMILY,
    EdgeGadget,
    ReductionSpec,
    apply_reduction,
)
from .solvers import (
    budget_threshold,
    fvs_number,
    hamiltonian_cycle,
    has_ham_cycle,
    optimal_solution,
)


class VerifierError(ValueError):
    """Unsupported reduction, bad bound, or malformed verdict."""


OUTCOME_CORRECT = "correct"
OUTCOME_INCORRECT = "incorrect"
OUTCOME_VIOLATION = "characterizationViolation"

METHOD_CHARACTERIZATION = "characterization"
METHOD_SEARCH = "search"

POSITIVE_LOST = "positiveLost"
NEGATIVE_GAINED = "negativeGained"

DEFAULT_UNDIRECTED_BOUND = 6
DEFAULT_DIRECTED_BOUND = 5

# reductions the verifier has reference oracles and fixtures for
_SUPPORTED = frozenset(
    {
        (ProblemId.VERTEX_COVER, ProblemId.FEEDBACK_VERTEX_SET, EDGE_FAMILY),
        (ProblemId.VERTEX_COVER, ProblemId.DOMINATING_SET, EDGE_FAMILY),
        (ProblemId.CLIQUE, ProblemId.INDEPENDENT_SET, EDGE_FAMILY),
        (ProblemId.CLIQUE, ProblemId.CLIQUE, GLOBAL_FAMILY),
        (ProblemId.HAM_CYCLE_DIRECTED, ProblemId.HAM_CYCLE_UNDIRECTED, NODE_FAMILY),
    }
)


@dataclass(frozen=True)
class Counterexample:
    """A source instance on which the reduction flips the answer.

    Exactly one side is positive; that side carries a solution as
    checkable evidence.  The target instance is materialized so the
    disagreement can be replayed without re-running the reduction.
    """

    source: ProblemInstance
    target: ProblemInstance
    direction: str
    source_witness: tuple[str, ...] | None = None
    target_witness: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.direction not in (POSITIVE_LOST, NEGATIVE_GAINED):
            raise VerifierError(f"unknown direction {self.direction!r}")
        if self.direction == POSITIVE_LOST and self.source_witness is None:
            raise VerifierError("positiveLost needs a source witness")
        if self.direction == NEGATIVE_GAINED and self.target_witness is None:
            raise VerifierError("negativeGained needs a target witness")


@dataclass(frozen=True)
class Violation:
    """One failed condition of a gadget characterization."""

    prop: int
    explanation: str


@dataclass(frozen=True)
class VerifierVerdict:
    outcome: str
    method: str
    bound_checked: int | None = None
    violations: tuple[Violation, ...] = ()
    counterexample: Counterexample | None = None

    def __post_init__(self) -> None:
        if self.outcome not in (OUTCOME_CORRECT, OUTCOME_INCORRECT, OUTCOME_VIOLATION):
            raise VerifierError(f"unknown outcome {self.outcome!r}")
        if self.method not in (METHOD_CHARACTERIZATION, METHOD_SEARCH):
            raise VerifierError(f"unknown method {self.method!r}")
        if self.outcome == OUTCOME_CORRECT:
            if self.counterexample is not None or self.violations:
                raise VerifierError("a correct verdict carries no counterevidence")
            if (self.bound_checked is None) != (self.method == METHOD_CHARACTERIZATION):
                raise VerifierError("search verdicts are bound qualified")
        elif self.bound_checked is not None:
            raise VerifierError("only correct search verdicts carry a bound")
        if self.outcome == OUTCOME_INCORRECT:
            if self.counterexample is None or self.violations:
                raise VerifierError("an incorrect verdict is a bare counterexample")
        if self.outcome == OUTCOME_VIOLATION and not self.violations:
            raise VerifierError("a violation verdict lists failed conditions")


# -- characterization ------------------------------------------------------

_PROP_1_TEXT = (
    "the gadget body does not contain a cycle, so target cycles can only "
    "come from the source graph itself; a negative source instance whose "
    "graph has fewer than budget-many cycles turns into a positive target"
)


def _prop_2_text(terminal: str) -> str:
    return (
        f"removing terminal {terminal!r} from the gadget body leaves a cycle, "
        "so covering the matching endpoint of a source edge does not break "
        "that edge's gadget copy; a positive source instance can turn into a "
        "negative target"
    )


def verify_vc_to_fvs_edge_gadget(
    gadget: EdgeGadget | ReductionSpec,
) -> VerifierVerdict:
    """Exact correctness test for a vertex cover to feedback vertex set
    edge gadget, budgets carried over unchanged.

    The reduction is correct for every source instance iff the body has a
    cycle and deleting either terminal leaves the rest acyclic.  On
    failure each violated condition is reported, together with a concrete
    counterexample from the bounded search when one exists at the default
    bound.  A bare gadget is accepted as shorthand for the full reduction.
    """
    if isinstance(gadget, ReductionSpec):
        spec = gadget
        if (
            spec.source_problem is not ProblemId.VERTEX_COVER
            or spec.target_problem is not ProblemId.FEEDBACK_VERTEX_SET
            or spec.family != EDGE_FAMILY
        ):
            raise VerifierError(
                "the characterization covers vertex cover to feedback vertex "
                "set edge reductions only"
            )
        if spec.non_edge_gadget is not None:
            raise VerifierError("the characterization covers a single edge gadget")
        if spec.fixed_source_budget is not None:
            raise VerifierError("the characterization quantifies over every budget")
        if spec.param_map != IDENTITY_MAP:
            raise VerifierError(
                "the characterization requires the identity parameter map"
            )
    else:
        spec = ReductionSpec(
            family=EDGE_FAMILY,
            source_problem=ProblemId.VERTEX_COVER,
            target_problem=ProblemId.FEEDBACK_VERTEX_SET,
            edge_gadget=gadget,
        )
    body = spec.edge_gadget.body
    violations = []
    if is_acyclic(body):
        violations.append(Violation(1, _PROP_1_TEXT))
    else:
        for terminal in (spec.edge_gadget.terminal_u, spec.edge_gadget.terminal_v):
            if not is_acyclic(remove_nodes(body, [terminal])):
                violations.append(Violation(2, _prop_2_text(terminal)))
    if not violations:
        return VerifierVerdict(OUTCOME_CORRECT, METHOD_CHARACTERIZATION)
    found = verify_by_search(spec)
    return VerifierVerdict(
        OUTCOME_VIOLATION,
        METHOD_CHARACTERIZATION,
        violations=tuple(violations),
        counterexample=found.counterexample,
    )


# -- isomorphism class tables ----------------------------------------------


def _index_pairs(directed: bool, n: int) -> list[tuple[int, int]]:
    # positional twin of graphs.node_pairs for nodes v1..vn
    if directed:
        return [(i, j) for i in range(n) for j in range(n) if i != j]
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@lru_cache(maxsize=None)
def _class_ids(directed: bool, n: int) -> tuple[int, ...]:
    """Isomorphism class id per edge bitmask, orbit-filled.

    Ascending masks meet each orbit at its least member first, so the
    representative of a class is always the first mask the scan sees.
    """
    pairs = _index_pairs(directed, n)
    where = {p: t for t, p in enumerate(pairs)}
    perms = list(permutations(range(n)))
    ids = [-1] * (1 << len(pairs))
    fresh = 0
    for mask in range(len(ids)):
        if ids[mask] != -1:
            continue
        for perm in perms:
            image = 0
            rest = mask
            while rest:
                bit = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                a, b = pairs[bit]
                x, y = perm[a], perm[b]
                if not directed and x > y:
                    x, y = y, x
                image |= 1 << where[(x, y)]
            if ids[image] == -1:
                ids[image] = fresh
        fresh += 1
    return tuple(ids)


def _strip_marks(g: Graph) -> Graph:
    return Graph(g.directed, g.nodes, sorted(g.edges))


def _fvs_core(body: Graph, keep: frozenset[str]) -> Graph:
    """Iteratively drop degree at most one nodes outside ``keep``."""
    g = _strip_marks(body)
    while True:
        degree = {v: 0 for v in g.nodes}
        for a, b in g.edges:
            degree[a] += 1
            degree[b] += 1
        victims = [v for v in g.nodes if v not in keep and degree[v] <= 1]
        if not victims:
            return g
        g = remove_nodes(g, victims)


def _has_terminal_swap(body: Graph, u: str, v: str) -> bool:
    """Whether some body automorphism exchanges the two terminals."""
    if len(body.nodes) > 8:
        return False  # give up, the labeled scan is always sound
    one = Graph(False, body.nodes, sorted(body.edges),
                selected_nodes=[u], highlighted_nodes=[v])
    two = Graph(False, body.nodes, sorted(body.edges),
                selected_nodes=[v], highlighted_nodes=[u])
    return isomorphic(one, two, respect_marks=True) is not None


def _class_cacheable(spec: ReductionSpec) -> bool:
    if spec.family != EDGE_FAMILY:
        return True
    for gadget in (spec.edge_gadget, spec.non_edge_gadget):
        if gadget is None:
            continue
        u, v = gadget.terminal_u, gadget.terminal_v
        body = gadget.body
        if spec.target_problem is ProblemId.FEEDBACK_VERTEX_SET:
            body = _fvs_core(body, frozenset((u, v)))
        if not _has_terminal_swap(body, u, v):
            return False
    return True


# -- bounded search --------------------------------------------------------


def _default_bound(spec: ReductionSpec) -> int:
    if spec.source_problem.directed_input:
        return DEFAULT_DIRECTED_BOUND
    return DEFAULT_UNDIRECTED_BOUND


def _source_oracle_limit(spec: ReductionSpec) -> int:
    if spec.source_problem.requires_budget:
        return SUBSET_ORACLE_BOUND
    return HAM_CYCLE_ORACLE_BOUND


def search_supported(source: ProblemId, target: ProblemId, family: str) -> bool:
    """Whether verify_by_search covers this problem pair and gadget family."""
    return (source, target, family) in _SUPPORTED


def search_node_limit(source: ProblemId) -> int:
    """Largest maxNodes verify_by_search accepts for this source problem."""
    if source.requires_budget:
        return SUBSET_ORACLE_BOUND
    return HAM_CYCLE_ORACLE_BOUND


def characterization_applies(spec: ReductionSpec) -> bool:
    """Whether the exact vertex cover to feedback vertex set test covers a spec."""
    return (
        spec.family == EDGE_FAMILY
        and spec.source_problem is ProblemId.VERTEX_COVER
        and spec.target_problem is ProblemId.FEEDBACK_VERTEX_SET
        and spec.non_edge_gadget is None
        and spec.fixed_source_budget is None
        and spec.param_map == IDENTITY_MAP
    )


def verify_auto(
    spec: ReductionSpec,
    max_nodes: int | None = None,
    time_budget: float | None = None,
) -> VerifierVerdict:
    """Strongest applicable check: an explicit bound forces search, the
    characterization handles the one family it proves exactly, and
    everything else searches at the default bound."""
    if max_nodes is None and characterization_applies(spec):
        return verify_vc_to_fvs_edge_gadget(spec)
    return verify_by_search(spec, max_nodes, time_budget)


def _target_graph(spec: ReductionSpec, g: Graph) -> Graph:
    probe = 0 if spec.source_problem.requires_budget else None
    return apply_reduction(spec, ProblemInstance(g, probe)).graph


def _positive_witness(problem: ProblemId, inst: ProblemInstance) -> tuple[str, ...]:
    """A checkable solution for a positive instance.

    Small instances use the enumeration oracle, whose first hit is the
    lexicographically least solution; larger ones fall back to the
    deterministic optimisation solvers.
    """
    n = len(inst.graph.nodes)
    if problem.requires_budget:
        if n <= SUBSET_ORACLE_BOUND:
            return decide(problem, inst).solution
        return optimal_solution(problem, inst.graph)
    if n <= HAM_CYCLE_ORACLE_BOUND:
        return decide(problem, inst).solution
    cycle = hamiltonian_cycle(inst.graph)
    assert cycle is not None
    return cycle


def _counterexample(
    spec: ReductionSpec, src: ProblemInstance, src_positive: bool
) -> Counterexample:
    target = apply_reduction(spec, src)
    if src_positive:
        return Counterexample(
            source=src,
            target=target,
            direction=POSITIVE_LOST,
            source_witness=_positive_witness(spec.source_problem, src),
        )
    return Counterexample(
        source=src,
        target=target,
        direction=NEGATIVE_GAINED,
        target_witness=_positive_witness(spec.target_problem, target),
    )


def _measure(spec: ReductionSpec, g: Graph, budget_cap: int | None) -> tuple:
    """The pair of numbers (or booleans) deciding every budget for ``g``."""
    target = _target_graph(spec, g)
    if not spec.source_problem.requires_budget:
        return (has_ham_cycle(g), has_ham_cycle(target))
    source_threshold = budget_threshold(spec.source_problem, g)
    if spec.target_problem is ProblemId.FEEDBACK_VERTEX_SET:
        # saturating above the largest mapped budget keeps the search shallow
        target_threshold = fvs_number(target, cap=budget_cap)
    else:
        target_threshold = budget_threshold(spec.target_problem, target)
    return (source_threshold, target_threshold)


def _decisions_at(
    spec: ReductionSpec, data: tuple, k: int, nodes: int, edges: int
) -> tuple[bool, bool]:
    source_threshold, target_threshold = data
    src = k >= source_threshold if spec.source_problem.minimizing else k <= source_threshold
    mapped = spec.param_map.apply(k, nodes, edges)
    tgt = (
        mapped >= target_threshold
        if spec.target_problem.minimizing
        else mapped <= target_threshold
    )
    return src, tgt


def verify_by_search(
    spec: ReductionSpec,
    max_nodes: int | None = None,
    time_budget: float | None = None,
) -> VerifierVerdict:
    """Refutation search over all source instances up to ``max_nodes``.

    Instances are scanned in the enumerate_instances order (node count,
    then edge bitmask, then budget); the first instance whose source and
    target decisions disagree becomes the counterexample, which makes the
    result deterministic and minimal for that order.  ``max_nodes``
    defaults to 6 for undirected sources and 5 for directed ones.  With a
    ``time_budget`` (seconds) the scan may stop early and then reports
    the largest node count it fully completed.

    Hamiltonian cycle sources start at three nodes, the smallest size at
    which a cycle exists at all; one and two node sources are degenerate,
    not evidence about a gadget.
    """
    triple = (spec.source_problem, spec.target_problem, spec.family)
    if triple not in _SUPPORTED:
        raise VerifierError(
            "unsupported triple: "
            f"({spec.source_problem.value}, {spec.target_problem.value}, {spec.family})"
        )
    if max_nodes is None:
        max_nodes = _default_bound(spec)
    limit = _source_oracle_limit(spec)
    if not isinstance(max_nodes, int) or isinstance(max_nodes, bool) or max_nodes < 1:
        raise VerifierError("maxNodes must be a positive integer")
    if max_nodes > limit:
        raise VerifierError(
            f"maxNodes {max_nodes} exceeds the {limit} node oracle bound "
            f"for {spec.source_problem.value} sources"
        )
    deadline = None if time_budget is None else time.monotonic() + time_budget
    directed = spec.source_problem.directed_input
    budgeted = spec.source_problem.requires_budget
    capped = spec.target_problem is ProblemId.FEEDBACK_VERTEX_SET
    floor = 1 if budgeted else 3
    by_class = _class_cacheable(spec)
    completed = 0
    for n in range(1, max_nodes + 1):
        if n < floor:
            completed = n
            continue
        if spec.fixed_source_budget is not None and spec.fixed_source_budget > n:
            completed = n
            continue
        names = [f"v{i}" for i in range(1, n + 1)]
        pairs = [(names[i], names[j]) for i, j in _index_pairs(directed, n)]
        ids = _class_ids(directed, n) if by_class else None
        cache: dict[int, tuple] = {}
        if budgeted:
            if spec.fixed_source_budget is not None:
                budgets = [spec.fixed_source_budget]
            else:
                budgets = list(range(n + 1))
        else:
            budgets = [None]
        expired = False
        for mask in range(1 << len(pairs)):
            if deadline is not None and time.monotonic() > deadline:
                expired = True
                break
            m = mask.bit_count()
            cap = None
            if capped:
                cap = max(spec.param_map.apply(k, n, m) for k in budgets)
            g = None
            data = None if ids is None else cache.get(ids[mask])
            if data is None:
                g = Graph(
                    directed=directed,
                    nodes=names,
                    edges=[pairs[i] for i in range(len(pairs)) if mask >> i & 1],
                )
                data = _measure(spec, g, cap)
                if ids is not None:
                    cache[ids[mask]] = data
            for k in budgets:
                if budgeted:
                    src_pos, tgt_pos = _decisions_at(spec, data, k, n, m)
                else:
                    src_pos, tgt_pos = data
                if src_pos == tgt_pos:
                    continue
                if g is None:
                    g = Graph(
                        directed=directed,
                        nodes=names,
                        edges=[pairs[i] for i in range(len(pairs)) if mask >> i & 1],
                    )
                found = _counterexample(spec, ProblemInstance(g, k), src_pos)
                return VerifierVerdict(
                    OUTCOME_INCORRECT, METHOD_SEARCH, counterexample=found
                )
        if expired:
            break
        completed = n
    return VerifierVerdict(OUTCOME_CORRECT, METHOD_SEARCH, bound_checked=completed)


# -- feedback text ---------------------------------------------------------


def _render_instance(inst: ProblemInstance) -> str:
    g = inst.graph
    arrow = "->" if g.directed else "-"
    if g.edges:
        edges = ", ".join(f"{a}{arrow}{b}" for a, b in sorted(g.edges))
    else:
        edges = "none"
    text = f"nodes {', '.join(g.nodes)}; edges {edges}"
    if inst.budget is not None:
        text += f"; budget {inst.budget}"
    return text


def _render_solution(inst: ProblemInstance, witness: tuple[str, ...]) -> str:
    # cycle problems have no budget and their solutions are closed walks
    if inst.budget is None:
        return " -> ".join(witness + witness[:1])
    if not witness:
        return "the empty set"
    return "{" + ", ".join(witness) + "}"


def _render_counterexample(ce: Counterexample) -> str:
    rendered = _render_instance(ce.source)
    if ce.direction == POSITIVE_LOST:
        return (
            f"Counterexample: the source instance ({rendered}) is positive, "
            f"witnessed by {_render_solution(ce.source, ce.source_witness)}, "
            "but the reduced target instance is negative."
        )
    return (
        f"Counterexample: the source instance ({rendered}) is negative, but "
        "the reduced target instance is positive, witnessed by "
        f"{_render_solution(ce.target, ce.target_witness)}."
    )


def explain(verdict: VerifierVerdict) -> str:
    """Human readable feedback for a verdict."""
    if verdict.outcome == OUTCOME_CORRECT:
        if verdict.method == METHOD_CHARACTERIZATION:
            return "No counterexample exists; characterization satisfied."
        return f"No counterexample up to {verdict.bound_checked} nodes."
    if verdict.outcome == OUTCOME_INCORRECT:
        return _render_counterexample(verdict.counterexample)
    lines = ["The gadget fails its characterization."]
    for violation in verdict.violations:
        lines.append(f"Condition {violation.prop}: {violation.explanation}.")
    if verdict.counterexample is not None:
        lines.append(_render_counterexample(verdict.counterexample))
    else:
        lines.append("No counterexample exists at the default search bound.")
    return "\n".join(lines)


# -- wire format -----------------------------------------------------------


def counterexample_to_obj(ce: Counterexample) -> dict:
    out: dict = {
        "source": instance_to_obj(ce.source),
        "target": instance_to_obj(ce.target),
        "direction": ce.direction,
    }
    if ce.source_witness is not None:
        out["sourceWitness"] = list(ce.source_witness)
    if ce.target_witness is not None:
        out["targetWitness"] = list(ce.target_witness)
    return out


def verdict_to_obj(verdict: VerifierVerdict) -> dict:
    out: dict = {"outcome": verdict.outcome, "method": verdict.method}
    if verdict.bound_checked is not None:
        out["boundChecked"] = verdict.bound_checked
    if verdict.violations:
        out["violations"] = [
            {"property": v.prop, "explanation": v.explanation}
            for v in verdict.violations
        ]
    if verdict.counterexample is not None:
        out["counterexample"] = counterexample_to_obj(verdict.counterexample)
    out["explanation"] = explain(verdict)
    return out
