"""Tests for the problem catalog.

Decision oracles in this file re-derive everything through independent
routes: the canned first-order sentences evaluated by the relational-table
oracle (vertex cover, dominating set, independent set), exhaustive cycle
enumeration (feedback vertex set, acyclicity), complement duality
(clique), and raw permutation scans (Hamiltonian cycles).
"""

from __future__ import annotations

from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from reductio import fol
from reductio.graphs import (
    GRAPH_AND_BUDGET,
    GRAPH_ONLY,
    Graph,
    ProblemInstance,
    canonical_edge,
    enumerate_instances,
    remove_nodes,
)
from reductio.problems import (
    CandidateVerdict,
    Decision,
    HAM_CYCLE_ORACLE_BOUND,
    ProblemError,
    ProblemId,
    SUBSET_ORACLE_BOUND,
    Witness,
    candidate_verdict_to_obj,
    decide,
    decision_to_obj,
    least_cycle,
    problem_from_wire,
    verify_candidate,
    verify_cycle,
    witness_to_obj,
)

from oracles import all_simple_cycles, complement_graph, subsets_ascending, table_evaluate
from strategies import graphs

SUBSET_PROBLEMS = (
    ProblemId.VERTEX_COVER,
    ProblemId.DOMINATING_SET,
    ProblemId.FEEDBACK_VERTEX_SET,
    ProblemId.CLIQUE,
    ProblemId.INDEPENDENT_SET,
)

_VC = fol.parse_formula(fol.VERTEX_COVER_TEXT)
_DS = fol.parse_formula(fol.DOMINATING_SET_TEXT)
_IS = fol.parse_formula(fol.INDEPENDENT_SET_TEXT)


def oracle_solves(p: ProblemId, g: Graph, subset: tuple[str, ...]) -> bool:
    """Structure check through sentence tables and cycle enumeration."""
    marked = Graph(False, g.nodes, sorted(g.edges), selected_nodes=subset)
    if p is ProblemId.VERTEX_COVER:
        return table_evaluate(_VC, marked)
    if p is ProblemId.DOMINATING_SET:
        return table_evaluate(_DS, marked)
    if p is ProblemId.INDEPENDENT_SET:
        return table_evaluate(_IS, marked)
    if p is ProblemId.CLIQUE:
        comp = complement_graph(g)
        comp_marked = Graph(False, comp.nodes, sorted(comp.edges), selected_nodes=subset)
        return table_evaluate(_IS, comp_marked)
    assert p is ProblemId.FEEDBACK_VERTEX_SET
    return not all_simple_cycles(remove_nodes(g, subset))


def oracle_decide(p: ProblemId, inst: ProblemInstance) -> Decision:
    g, k = inst.graph, inst.budget
    assert k is not None
    if p.minimizing:
        for subset in subsets_ascending(g.nodes, k):
            if oracle_solves(p, g, subset):
                return Decision(True, subset)
        return Decision(False)
    if k > len(g.nodes):
        return Decision(False)
    for subset in combinations(g.nodes, k):
        if oracle_solves(p, g, subset):
            return Decision(True, subset)
    return Decision(False)


def oracle_is_cycle(g: Graph, seq: tuple[str, ...]) -> bool:
    if len(seq) != len(g.nodes) or len(seq) < 3 or set(seq) != set(g.nodes):
        return False
    if len(set(seq)) != len(seq):
        return False
    for i in range(len(seq)):
        a, b = seq[i], seq[(i + 1) % len(seq)]
        if g.directed:
            if (a, b) not in g.edges:
                return False
        elif canonical_edge(False, a, b) not in g.edges:
            return False
    return True


def oracle_first_ham_cycle(g: Graph) -> tuple[str, ...] | None:
    for seq in permutations(g.nodes):
        if oracle_is_cycle(g, seq):
            return seq
    return None


def p3():
    return Graph(False, ("a", "b", "c"), (("a", "b"), ("b", "c")))


def triangle():
    return Graph(False, ("a", "b", "c"), (("a", "b"), ("a", "c"), ("b", "c")))


def c4():
    return Graph(False, ("v1", "v2", "v3", "v4"),
                 (("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v1", "v4")))


class TestCatalog:
    def test_wire_ids(self):
        assert problem_from_wire("vertex-cover") is ProblemId.VERTEX_COVER
        assert problem_from_wire("ham-cycle-directed") is ProblemId.HAM_CYCLE_DIRECTED
        with pytest.raises(ProblemError, match="unknown problem id 'sat'"):
            problem_from_wire("sat")

    def test_metadata(self):
        assert all(
            p.requires_budget
            for p in SUBSET_PROBLEMS
        )
        assert not ProblemId.HAM_CYCLE_DIRECTED.requires_budget
        assert not ProblemId.HAM_CYCLE_UNDIRECTED.requires_budget
        assert [p for p in ProblemId if p.directed_input] == [ProblemId.HAM_CYCLE_DIRECTED]
        assert [p for p in ProblemId if p.minimizing] == [
            ProblemId.VERTEX_COVER,
            ProblemId.DOMINATING_SET,
            ProblemId.FEEDBACK_VERTEX_SET,
        ]


class TestVerifyCandidate:
    def test_vc_valid_center(self):
        inst = ProblemInstance(p3(), 1)
        assert verify_candidate(ProblemId.VERTEX_COVER, inst, {"b"}) == CandidateVerdict(True)

    def test_vc_uncovered_edge_witness(self):
        inst = ProblemInstance(p3(), 1)
        verdict = verify_candidate(ProblemId.VERTEX_COVER, inst, {"a"})
        assert verdict == CandidateVerdict(False, Witness("uncoveredEdge", ("b", "c")))

    def test_fvs_single_removal_breaks_triangle(self):
        inst = ProblemInstance(triangle(), 1)
        assert verify_candidate(ProblemId.FEEDBACK_VERTEX_SET, inst, {"a"}).valid is True

    def test_fvs_surviving_cycle_witness(self):
        inst = ProblemInstance(triangle(), 1)
        verdict = verify_candidate(ProblemId.FEEDBACK_VERTEX_SET, inst, set())
        assert verdict.witness == Witness("survivingCycle", ("a", "b", "c"))

    def test_ds_isolated_node_must_be_chosen(self):
        g = Graph(False, ("a", "b", "c"), (("a", "b"),))
        inst = ProblemInstance(g, 2)
        verdict = verify_candidate(ProblemId.DOMINATING_SET, inst, {"a"})
        assert verdict.witness == Witness("undominatedNode", ("c",))
        assert verify_candidate(ProblemId.DOMINATING_SET, inst, {"a", "c"}).valid is True

    def test_clique_missing_pair_witness(self):
        inst = ProblemInstance(p3(), 2)
        verdict = verify_candidate(ProblemId.CLIQUE, inst, {"a", "c"})
        assert verdict.witness == Witness("missingEdgePair", ("a", "c"))

    def test_independent_set_adjacent_pair_witness(self):
        inst = ProblemInstance(p3(), 2)
        verdict = verify_candidate(ProblemId.INDEPENDENT_SET, inst, {"a", "b"})
        assert verdict.witness == Witness("adjacentSelectedPair", ("a", "b"))
        assert verify_candidate(ProblemId.INDEPENDENT_SET, inst, {"a", "c"}).valid is True

    def test_budget_witness_carries_counts(self):
        inst = ProblemInstance(p3(), 1)
        verdict = verify_candidate(ProblemId.VERTEX_COVER, inst, {"a", "b", "c"})
        assert verdict.witness == Witness("budget", allowed=1, actual=3)

    def test_structural_beats_budget(self):
        # candidate both misses an edge and exceeds the budget
        inst = ProblemInstance(p3(), 0)
        verdict = verify_candidate(ProblemId.VERTEX_COVER, inst, {"a"})
        assert verdict.witness.kind == "uncoveredEdge"

    def test_clique_budget_is_lower_bound(self):
        inst = ProblemInstance(triangle(), 3)
        verdict = verify_candidate(ProblemId.CLIQUE, inst, {"a", "b"})
        assert verdict.witness == Witness("budget", allowed=3, actual=2)
        assert verify_candidate(ProblemId.CLIQUE, inst, {"a", "b", "c"}).valid is True

    def test_empty_candidate(self):
        inst = ProblemInstance(p3(), 0)
        assert verify_candidate(ProblemId.INDEPENDENT_SET, inst, set()).valid is True
        verdict = verify_candidate(ProblemId.VERTEX_COVER, inst, set())
        assert verdict.witness == Witness("uncoveredEdge", ("a", "b"))

    def test_preconditions(self):
        with pytest.raises(ProblemError, match="requires a budget"):
            verify_candidate(ProblemId.VERTEX_COVER, ProblemInstance(p3()), set())
        with pytest.raises(ProblemError, match="takes no budget"):
            decide(ProblemId.HAM_CYCLE_UNDIRECTED, ProblemInstance(triangle(), 1))
        with pytest.raises(ProblemError, match="requires an undirected graph"):
            verify_candidate(
                ProblemId.VERTEX_COVER,
                ProblemInstance(Graph(True, ("a", "b"), (("a", "b"),)), 1),
                set(),
            )
        with pytest.raises(ProblemError, match="not in the graph"):
            verify_candidate(ProblemId.VERTEX_COVER, ProblemInstance(p3(), 1), {"z"})
        with pytest.raises(ProblemError, match="use verify_cycle"):
            verify_candidate(ProblemId.HAM_CYCLE_UNDIRECTED, ProblemInstance(triangle()), set())

    def test_witness_serialization(self):
        assert witness_to_obj(Witness("uncoveredEdge", ("b", "c"))) == {
            "kind": "uncoveredEdge",
            "nodes": ["b", "c"],
        }
        assert witness_to_obj(Witness("budget", allowed=1, actual=3)) == {
            "kind": "budget",
            "allowed": 1,
            "actual": 3,
        }
        assert candidate_verdict_to_obj(CandidateVerdict(True)) == {"valid": True}


class TestVerifyCycle:
    def test_k3_order(self):
        assert verify_cycle(ProblemId.HAM_CYCLE_UNDIRECTED, triangle(), ["a", "b", "c"]) is True

    def test_directed_wrong_way(self):
        g = Graph(True, ("a", "b", "c"), (("a", "b"), ("b", "c"), ("c", "a")))
        assert verify_cycle(ProblemId.HAM_CYCLE_DIRECTED, g, ["a", "b", "c"]) is True
        assert verify_cycle(ProblemId.HAM_CYCLE_DIRECTED, g, ["a", "c", "b"]) is False

    def test_missing_node_is_false(self):
        assert verify_cycle(ProblemId.HAM_CYCLE_UNDIRECTED, triangle(), ["a", "b"]) is False

    def test_duplicates_are_false(self):
        assert verify_cycle(ProblemId.HAM_CYCLE_UNDIRECTED, triangle(), ["a", "b", "b"]) is False

    def test_two_node_digraph_has_no_ham_cycle(self):
        g = Graph(True, ("a", "b"), (("a", "b"), ("b", "a")))
        assert verify_cycle(ProblemId.HAM_CYCLE_DIRECTED, g, ["a", "b"]) is False

    def test_non_cycle_problem_rejected(self):
        with pytest.raises(ProblemError, match="not a cycle problem"):
            verify_cycle(ProblemId.VERTEX_COVER, triangle(), ["a", "b", "c"])


class TestDecide:
    def test_c4_needs_two(self):
        assert decide(ProblemId.VERTEX_COVER, ProblemInstance(c4(), 1)) == Decision(False)
        assert decide(ProblemId.VERTEX_COVER, ProblemInstance(c4(), 2)) == Decision(
            True, ("v1", "v3")
        )

    def test_minimizing_returns_smallest_first(self):
        # k=3 still reports the size-2 cover first
        assert decide(ProblemId.VERTEX_COVER, ProblemInstance(c4(), 3)).solution == ("v1", "v3")

    def test_fvs_triangle(self):
        assert decide(ProblemId.FEEDBACK_VERTEX_SET, ProblemInstance(triangle(), 0)) == Decision(False)
        assert decide(ProblemId.FEEDBACK_VERTEX_SET, ProblemInstance(triangle(), 1)) == Decision(
            True, ("a",)
        )

    def test_clique_scans_exact_size(self):
        assert decide(ProblemId.CLIQUE, ProblemInstance(triangle(), 3)) == Decision(
            True, ("a", "b", "c")
        )
        assert decide(ProblemId.CLIQUE, ProblemInstance(p3(), 3)) == Decision(False)
        assert decide(ProblemId.CLIQUE, ProblemInstance(p3(), 4)) == Decision(False)

    def test_budget_zero_positive_for_maximizing(self):
        assert decide(ProblemId.CLIQUE, ProblemInstance(p3(), 0)) == Decision(True, ())

    def test_ham_cycle_complete_graph(self):
        k4 = Graph(False, ("a", "b", "c", "d"),
                   [(x, y) for x, y in combinations("abcd", 2)])
        assert decide(ProblemId.HAM_CYCLE_UNDIRECTED, ProblemInstance(k4)) == Decision(
            True, ("a", "b", "c", "d")
        )

    def test_ham_cycle_two_nodes_negative(self):
        g = Graph(True, ("a", "b"), (("a", "b"), ("b", "a")))
        assert decide(ProblemId.HAM_CYCLE_DIRECTED, ProblemInstance(g)) == Decision(False)

    def test_oracle_bounds(self):
        big = Graph(False, tuple(f"n{i:02d}" for i in range(SUBSET_ORACLE_BOUND + 1)))
        with pytest.raises(ProblemError, match="oracle bound exceeded"):
            decide(ProblemId.VERTEX_COVER, ProblemInstance(big, 1))
        big_hc = Graph(False, tuple(f"n{i:02d}" for i in range(HAM_CYCLE_ORACLE_BOUND + 1)))
        with pytest.raises(ProblemError, match="oracle bound exceeded"):
            decide(ProblemId.HAM_CYCLE_UNDIRECTED, ProblemInstance(big_hc))

    def test_decision_serialization(self):
        assert decision_to_obj(Decision(True, ("a",))) == {"positive": True, "solution": ["a"]}
        assert decision_to_obj(Decision(False)) == {"positive": False}


class TestLeastCycle:
    def test_triangle(self):
        assert least_cycle(triangle()) == ("a", "b", "c")

    def test_acyclic_none(self):
        assert least_cycle(p3()) is None

    def test_prefers_shorter_then_lex(self):
        g = Graph(
            False,
            ("a", "b", "c", "d"),
            (("a", "b"), ("b", "c"), ("c", "d"), ("a", "d"), ("a", "c")),
        )
        # triangle a-b-c beats the 4-cycle a-b-c-d and a-c-d
        assert least_cycle(g) == ("a", "b", "c")

    def test_directed_two_cycle(self):
        g = Graph(True, ("a", "b"), (("a", "b"), ("b", "a")))
        assert least_cycle(g) == ("a", "b")


# -- exhaustive cross-checks ----------------------------------------------

def small_budget_instances(max_nodes):
    yield from enumerate_instances(GRAPH_AND_BUDGET, directed=False, max_nodes=max_nodes)


@pytest.mark.parametrize("problem", SUBSET_PROBLEMS)
def test_decide_matches_oracle_exhaustively(problem):
    for inst in small_budget_instances(4):
        assert decide(problem, inst) == oracle_decide(problem, inst), inst

@pytest.mark.parametrize("problem", SUBSET_PROBLEMS)
def test_decide_agrees_with_verify_candidate(problem):
    for inst in small_budget_instances(3):
        decision = decide(problem, inst)
        if decision.positive:
            assert verify_candidate(problem, inst, set(decision.solution)).valid
        else:
            for subset in subsets_ascending(inst.graph.nodes):
                assert not verify_candidate(problem, inst, set(subset)).valid


def test_monotonicity_across_budgets():
    for inst in small_budget_instances(4):
        n = len(inst.graph.nodes)
        for problem in SUBSET_PROBLEMS:
            positive = decide(problem, inst).positive
            if problem.minimizing:
                if positive and inst.budget < n:
                    bumped = ProblemInstance(inst.graph, inst.budget + 1)
                    assert decide(problem, bumped).positive
            elif positive and inst.budget >= 1:
                lowered = ProblemInstance(inst.graph, inst.budget - 1)
                assert decide(problem, lowered).positive


def test_clique_complement_duality():
    for inst in small_budget_instances(4):
        comp = ProblemInstance(complement_graph(inst.graph), inst.budget)
        assert (
            decide(ProblemId.CLIQUE, inst).positive
            == decide(ProblemId.INDEPENDENT_SET, comp).positive
        )


def test_ham_cycle_decide_matches_permutation_scan():
    for directed, max_nodes in ((False, 4), (True, 3)):
        problem = ProblemId.HAM_CYCLE_DIRECTED if directed else ProblemId.HAM_CYCLE_UNDIRECTED
        for inst in enumerate_instances(GRAPH_ONLY, directed=directed, max_nodes=max_nodes):
            expected = oracle_first_ham_cycle(inst.graph)
            got = decide(problem, inst)
            if expected is None:
                assert got == Decision(False)
            else:
                assert got == Decision(True, expected)


# -- property tests --------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(g=graphs(max_nodes=5, directed=False), data=st.data())
def test_witnesses_are_least_counterevidence(g, data):
    n = len(g.nodes)
    k = data.draw(st.integers(0, n), label="budget")
    chosen = frozenset(data.draw(st.sets(st.sampled_from(g.nodes)), label="candidate")) if n else frozenset()
    inst = ProblemInstance(g, k)
    for problem in SUBSET_PROBLEMS:
        verdict = verify_candidate(problem, inst, chosen)
        if verdict.valid:
            assert oracle_solves(problem, g, tuple(sorted(chosen)))
            size_ok = len(chosen) <= k if problem.minimizing else len(chosen) >= k
            assert size_ok
            continue
        w = verdict.witness
        if w.kind == "uncoveredEdge":
            assert w.nodes == min(
                e for e in sorted(g.edges) if e[0] not in chosen and e[1] not in chosen
            )
        elif w.kind == "undominatedNode":
            adj = g.adjacency()
            missed = [
                v for v in g.nodes
                if v not in chosen and not any(u in chosen for u in adj[v])
            ]
            assert w.nodes == (missed[0],)
        elif w.kind == "survivingCycle":
            remainder = remove_nodes(g, chosen)
            cycles = [tuple(c) for c in all_simple_cycles(remainder)]
            assert w.nodes == min(cycles)
        elif w.kind == "missingEdgePair":
            gaps = [
                pair for pair in combinations(sorted(chosen), 2)
                if canonical_edge(False, *pair) not in g.edges
            ]
            assert w.nodes == gaps[0]
        elif w.kind == "adjacentSelectedPair":
            hits = [
                pair for pair in combinations(sorted(chosen), 2)
                if canonical_edge(False, *pair) in g.edges
            ]
            assert w.nodes == hits[0]
        else:
            assert w.kind == "budget"
            assert oracle_solves(problem, g, tuple(sorted(chosen)))
            assert (w.allowed, w.actual) == (k, len(chosen))


@settings(max_examples=150, deadline=None)
@given(g=graphs(max_nodes=5, directed=False))
def test_least_cycle_matches_enumeration(g):
    cycles = [tuple(c) for c in all_simple_cycles(g)]
    assert least_cycle(g) == (min(cycles) if cycles else None)


@settings(max_examples=100, deadline=None)
@given(g=graphs(max_nodes=4, directed=True))
def test_least_cycle_matches_enumeration_directed(g):
    cycles = [tuple(c) for c in all_simple_cycles(g)]
    assert least_cycle(g) == (min(cycles) if cycles else None)


@settings(max_examples=150, deadline=None)
@given(g=graphs(max_nodes=5, directed=False), data=st.data())
def test_verify_cycle_matches_naive_check(g, data):
    problem = ProblemId.HAM_CYCLE_UNDIRECTED
    order = data.draw(st.permutations(list(g.nodes)), label="order")
    assert verify_cycle(problem, g, order) == oracle_is_cycle(g, tuple(order))
