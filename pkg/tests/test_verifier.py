"""Tests for reduction verification.

Expected counterexamples were frozen from an independent replay: walk
enumerate_instances in order, apply the reduction, and compare the two
decide calls.  The replay lives in this file (replay_first_disagreement)
and doubles as the reference the search results are checked against, so
the verifier and its oracle stay two separate code paths.
"""

from __future__ import annotations

import json

import pytest

from reductio.graphs import Graph, ProblemInstance, enumerate_instances, isomorphic
from reductio.problems import (
    HAM_CYCLE_ORACLE_BOUND,
    SUBSET_ORACLE_BOUND,
    ProblemId,
    decide,
    verify_candidate,
    verify_cycle,
)
from reductio.reductions import (
    EdgeGadget,
    GlobalGadget,
    NodeGadget,
    ParamMap,
    ReductionSpec,
    apply_reduction,
    serialize_spec,
)
from reductio.verifier import (
    METHOD_CHARACTERIZATION,
    METHOD_SEARCH,
    NEGATIVE_GAINED,
    OUTCOME_CORRECT,
    OUTCOME_INCORRECT,
    OUTCOME_VIOLATION,
    POSITIVE_LOST,
    Counterexample,
    VerifierError,
    VerifierVerdict,
    Violation,
    explain,
    verdict_to_obj,
    verify_by_search,
    verify_vc_to_fvs_edge_gadget,
)


def triangle_gadget() -> EdgeGadget:
    body = Graph(False, ("u", "v", "w"), (("u", "v"), ("u", "w"), ("v", "w")))
    return EdgeGadget(body, "u", "v")


def bare_edge_gadget() -> EdgeGadget:
    return EdgeGadget(Graph(False, ("u", "v"), (("u", "v"),)), "u", "v")


def lopsided_gadget() -> EdgeGadget:
    """Edge u-v with a triangle hanging off u; fails condition 2 at v."""
    body = Graph(
        False,
        ("u", "v", "w1", "w2"),
        (("u", "v"), ("u", "w1"), ("u", "w2"), ("w1", "w2")),
    )
    return EdgeGadget(body, "u", "v")


def theta_gadget() -> EdgeGadget:
    """Two internally disjoint u-v paths of different lengths."""
    body = Graph(
        False,
        ("u", "v", "a", "b", "c"),
        (("u", "a"), ("a", "v"), ("u", "b"), ("b", "c"), ("c", "v")),
    )
    return EdgeGadget(body, "u", "v")


def vc_fvs_spec(gadget: EdgeGadget) -> ReductionSpec:
    return ReductionSpec(
        family="edge",
        source_problem=ProblemId.VERTEX_COVER,
        target_problem=ProblemId.FEEDBACK_VERTEX_SET,
        edge_gadget=gadget,
    )


def vc_ds_spec() -> ReductionSpec:
    return ReductionSpec(
        family="edge",
        source_problem=ProblemId.VERTEX_COVER,
        target_problem=ProblemId.DOMINATING_SET,
        edge_gadget=triangle_gadget(),
    )


def complement_spec() -> ReductionSpec:
    return ReductionSpec(
        family="edge",
        source_problem=ProblemId.CLIQUE,
        target_problem=ProblemId.INDEPENDENT_SET,
        edge_gadget=EdgeGadget(Graph(False, ("u", "v")), "u", "v"),
        non_edge_gadget=bare_edge_gadget(),
    )


def universal_node_spec(policy: str = "ALL") -> ReductionSpec:
    return ReductionSpec(
        family="global",
        source_problem=ProblemId.CLIQUE,
        target_problem=ProblemId.CLIQUE,
        global_gadget=GlobalGadget(Graph(False, ("g",)), {"g": policy}),
        param_map=ParamMap(1, 0, 0, 1),
        fixed_source_budget=3,
    )


def path_node_spec() -> ReductionSpec:
    body = Graph(False, ("in", "mid", "out"), (("in", "mid"), ("mid", "out")))
    return ReductionSpec(
        family="node",
        source_problem=ProblemId.HAM_CYCLE_DIRECTED,
        target_problem=ProblemId.HAM_CYCLE_UNDIRECTED,
        node_gadget=NodeGadget(body, "in", "out"),
    )


def identity_node_spec() -> ReductionSpec:
    return ReductionSpec(
        family="node",
        source_problem=ProblemId.HAM_CYCLE_DIRECTED,
        target_problem=ProblemId.HAM_CYCLE_UNDIRECTED,
        node_gadget=NodeGadget(Graph(False, ("g",)), "g", "g"),
    )


def oracle_positive(problem: ProblemId, inst: ProblemInstance) -> bool:
    return decide(problem, inst).positive


def replay_first_disagreement(spec: ReductionSpec, max_nodes: int):
    """Independent scan: enumeration plus decide on both sides.

    Returns (source instance, source positive) for the first disagreement,
    or None.  Only usable while the targets stay inside the decide bounds.
    """
    directed = spec.source_problem.directed_input
    budgeted = spec.source_problem.requires_budget
    arity = "graph-and-budget" if budgeted else "graph-only"
    for inst in enumerate_instances(arity, directed=directed, max_nodes=max_nodes):
        if not budgeted and len(inst.graph.nodes) < 3:
            continue
        if (
            spec.fixed_source_budget is not None
            and inst.budget != spec.fixed_source_budget
        ):
            continue
        src_pos = oracle_positive(spec.source_problem, inst)
        tgt_pos = oracle_positive(spec.target_problem, apply_reduction(spec, inst))
        if src_pos != tgt_pos:
            return inst, src_pos
    return None


def check_counterexample(spec: ReductionSpec, ce: Counterexample) -> None:
    """Re-validate a counterexample through the enumeration oracle."""
    assert ce.target == apply_reduction(spec, ce.source)
    src_pos = oracle_positive(spec.source_problem, ce.source)
    bound = (
        SUBSET_ORACLE_BOUND
        if spec.target_problem.requires_budget
        else HAM_CYCLE_ORACLE_BOUND
    )
    if len(ce.target.graph.nodes) <= bound:
        tgt_pos = oracle_positive(spec.target_problem, ce.target)
        assert (src_pos, tgt_pos) == (
            (True, False) if ce.direction == POSITIVE_LOST else (False, True)
        )
    if ce.direction == POSITIVE_LOST:
        assert src_pos and ce.target_witness is None
        witness = ce.source_witness
        problem, inst = spec.source_problem, ce.source
    else:
        assert not src_pos and ce.source_witness is None
        witness = ce.target_witness
        problem, inst = spec.target_problem, ce.target
    if problem.requires_budget:
        assert verify_candidate(problem, inst, set(witness)).valid
    else:
        assert verify_cycle(problem, inst.graph, witness)


class TestCharacterization:
    def test_triangle_gadget_is_correct(self):
        verdict = verify_vc_to_fvs_edge_gadget(triangle_gadget())
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.method == METHOD_CHARACTERIZATION
        assert verdict.bound_checked is None
        assert verdict.counterexample is None

    def test_four_cycle_body_is_correct(self):
        body = Graph(
            False, ("u", "v", "a", "b"), (("u", "a"), ("a", "v"), ("v", "b"), ("b", "u"))
        )
        verdict = verify_vc_to_fvs_edge_gadget(EdgeGadget(body, "u", "v"))
        assert verdict.outcome == OUTCOME_CORRECT

    def test_bare_edge_fails_condition_one(self):
        verdict = verify_vc_to_fvs_edge_gadget(bare_edge_gadget())
        assert verdict.outcome == OUTCOME_VIOLATION
        assert [v.prop for v in verdict.violations] == [1]
        assert "does not contain a cycle" in verdict.violations[0].explanation

    def test_bare_edge_counterexample_is_single_edge_at_budget_zero(self):
        # frozen from the replay oracle: (K2, k=0) is VC-negative, and the
        # target equals K2 again, acyclic, so FVS accepts the empty set
        verdict = verify_vc_to_fvs_edge_gadget(bare_edge_gadget())
        ce = verdict.counterexample
        assert ce.direction == NEGATIVE_GAINED
        assert ce.source.graph.nodes == ("v1", "v2")
        assert set(ce.source.graph.edges) == {("v1", "v2")}
        assert ce.source.budget == 0
        assert ce.target_witness == ()
        check_counterexample(vc_fvs_spec(bare_edge_gadget()), ce)

    def test_edgeless_body_fails_condition_one(self):
        gadget = EdgeGadget(Graph(False, ("u", "v")), "u", "v")
        verdict = verify_vc_to_fvs_edge_gadget(gadget)
        assert [v.prop for v in verdict.violations] == [1]
        ce = verdict.counterexample
        assert ce.direction == NEGATIVE_GAINED
        assert ce.source.budget == 0

    def test_lopsided_gadget_fails_condition_two(self):
        verdict = verify_vc_to_fvs_edge_gadget(lopsided_gadget())
        assert verdict.outcome == OUTCOME_VIOLATION
        assert [v.prop for v in verdict.violations] == [2]
        assert "'v'" in verdict.violations[0].explanation

    def test_lopsided_counterexample_is_path_centered_off_lex_min(self):
        # frozen from the replay oracle: on the star v1-v2, v2-v3 a cover
        # must pick v2, but the copy for (v2, v3) hangs its triangle on v2's
        # partner v2 itself only in the (v1, v2) copy; the two fresh
        # triangles end up on v1 and v2, and one removal cannot hit both
        verdict = verify_vc_to_fvs_edge_gadget(lopsided_gadget())
        ce = verdict.counterexample
        assert ce.direction == POSITIVE_LOST
        assert set(ce.source.graph.edges) == {("v1", "v2"), ("v2", "v3")}
        assert ce.source.budget == 1
        assert ce.source_witness == ("v2",)
        check_counterexample(vc_fvs_spec(lopsided_gadget()), ce)

    def test_double_triangle_fails_condition_two_on_both_terminals(self):
        body = Graph(
            False,
            ("u", "v", "a", "b", "c", "d"),
            (
                ("u", "v"),
                ("u", "a"), ("u", "b"), ("a", "b"),
                ("v", "c"), ("v", "d"), ("c", "d"),
            ),
        )
        verdict = verify_vc_to_fvs_edge_gadget(EdgeGadget(body, "u", "v"))
        assert [v.prop for v in verdict.violations] == [2, 2]
        texts = " ".join(v.explanation for v in verdict.violations)
        assert "'u'" in texts and "'v'" in texts

    def test_full_spec_with_identity_map_accepted(self):
        spec = ReductionSpec(
            family="edge",
            source_problem=ProblemId.VERTEX_COVER,
            target_problem=ProblemId.FEEDBACK_VERTEX_SET,
            edge_gadget=triangle_gadget(),
            param_map=ParamMap(1, 0, 0, 0),
        )
        assert verify_vc_to_fvs_edge_gadget(spec).outcome == OUTCOME_CORRECT

    def test_non_identity_map_rejected(self):
        spec = ReductionSpec(
            family="edge",
            source_problem=ProblemId.VERTEX_COVER,
            target_problem=ProblemId.FEEDBACK_VERTEX_SET,
            edge_gadget=triangle_gadget(),
            param_map=ParamMap(1, 0, 0, 1),
        )
        with pytest.raises(VerifierError, match="identity parameter map"):
            verify_vc_to_fvs_edge_gadget(spec)

    def test_wrong_problem_pair_rejected(self):
        with pytest.raises(VerifierError, match="characterization covers"):
            verify_vc_to_fvs_edge_gadget(vc_ds_spec())

    def test_non_edge_gadget_rejected(self):
        spec = ReductionSpec(
            family="edge",
            source_problem=ProblemId.VERTEX_COVER,
            target_problem=ProblemId.FEEDBACK_VERTEX_SET,
            edge_gadget=triangle_gadget(),
            non_edge_gadget=bare_edge_gadget(),
        )
        with pytest.raises(VerifierError, match="single edge gadget"):
            verify_vc_to_fvs_edge_gadget(spec)

    def test_fixed_budget_rejected(self):
        spec = ReductionSpec(
            family="edge",
            source_problem=ProblemId.VERTEX_COVER,
            target_problem=ProblemId.FEEDBACK_VERTEX_SET,
            edge_gadget=triangle_gadget(),
            fixed_source_budget=2,
        )
        with pytest.raises(VerifierError, match="every budget"):
            verify_vc_to_fvs_edge_gadget(spec)


class TestKnownGoodSearch:
    def test_vc_to_fvs_triangle(self):
        verdict = verify_by_search(vc_fvs_spec(triangle_gadget()))
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.method == METHOD_SEARCH
        assert verdict.bound_checked == 6

    def test_vc_to_ds_triangle(self):
        verdict = verify_by_search(vc_ds_spec())
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 6

    def test_clique_to_is_complement(self):
        verdict = verify_by_search(complement_spec())
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 6

    def test_three_to_four_clique_universal_node(self):
        verdict = verify_by_search(universal_node_spec())
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 6

    def test_ham_cycle_path_gadget(self):
        verdict = verify_by_search(path_node_spec())
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 5

    def test_theta_gadget_correct_both_ways(self):
        gadget = theta_gadget()
        assert verify_vc_to_fvs_edge_gadget(gadget).outcome == OUTCOME_CORRECT
        verdict = verify_by_search(vc_fvs_spec(gadget), max_nodes=4)
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 4


class TestKnownBadSearch:
    def test_isolated_node_policy_loses_positive_triangle(self):
        # frozen from the replay oracle: K3 holds a 3-clique, but the added
        # body node stays isolated, so no 4-clique appears in the target
        verdict = verify_by_search(universal_node_spec("NONE"))
        assert verdict.outcome == OUTCOME_INCORRECT
        ce = verdict.counterexample
        assert ce.direction == POSITIVE_LOST
        assert set(ce.source.graph.edges) == {
            ("v1", "v2"), ("v1", "v3"), ("v2", "v3")
        }
        assert ce.source.budget == 3
        assert ce.source_witness == ("v1", "v2", "v3")
        assert ce.target.budget == 4
        assert "g@global" in ce.target.graph.nodes
        check_counterexample(universal_node_spec("NONE"), ce)

    def test_identity_node_gadget_gains_undirected_triangle(self):
        # frozen from the replay oracle: arcs v1->v2, v1->v3, v2->v3 form no
        # directed cycle, but their merged undirected edges are a triangle
        verdict = verify_by_search(identity_node_spec())
        assert verdict.outcome == OUTCOME_INCORRECT
        ce = verdict.counterexample
        assert ce.direction == NEGATIVE_GAINED
        assert len(ce.source.graph.nodes) == 3
        assert set(ce.source.graph.edges) == {
            ("v1", "v2"), ("v1", "v3"), ("v2", "v3")
        }
        assert ce.source.budget is None
        assert ce.target_witness == ("g@v1", "g@v2", "g@v3")
        check_counterexample(identity_node_spec(), ce)

    def test_bare_edge_search_matches_characterization_route(self):
        verdict = verify_by_search(vc_fvs_spec(bare_edge_gadget()))
        assert verdict.outcome == OUTCOME_INCORRECT
        ce = verdict.counterexample
        assert ce.direction == NEGATIVE_GAINED
        assert ce.source.budget == 0
        assert set(ce.source.graph.edges) == {("v1", "v2")}

    def test_search_matches_independent_replay(self):
        # every spec whose targets stay inside the decide bounds at the
        # chosen source size; the three-node path gadget is absent because
        # its targets outgrow the cycle oracle already at three source nodes
        two_node_path = ReductionSpec(
            family="node",
            source_problem=ProblemId.HAM_CYCLE_DIRECTED,
            target_problem=ProblemId.HAM_CYCLE_UNDIRECTED,
            node_gadget=NodeGadget(
                Graph(False, ("in", "out"), (("in", "out"),)), "in", "out"
            ),
        )
        cases = [
            (vc_fvs_spec(triangle_gadget()), 3),
            (vc_fvs_spec(bare_edge_gadget()), 3),
            (vc_fvs_spec(lopsided_gadget()), 3),
            (vc_ds_spec(), 3),
            (complement_spec(), 3),
            (universal_node_spec(), 4),
            (universal_node_spec("NONE"), 4),
            (identity_node_spec(), 3),
            (two_node_path, 3),
        ]
        for spec, bound in cases:
            verdict = verify_by_search(spec, max_nodes=bound)
            replay = replay_first_disagreement(spec, bound)
            if replay is None:
                assert verdict.outcome == OUTCOME_CORRECT, serialize_spec(spec)
                assert verdict.bound_checked == bound
                continue
            inst, src_pos = replay
            ce = verdict.counterexample
            assert ce is not None, serialize_spec(spec)
            assert ce.source == inst
            assert ce.direction == (POSITIVE_LOST if src_pos else NEGATIVE_GAINED)
            check_counterexample(spec, ce)

    def test_search_is_deterministic(self):
        first = verify_by_search(universal_node_spec("NONE"))
        second = verify_by_search(universal_node_spec("NONE"))
        assert verdict_to_obj(first) == verdict_to_obj(second)


class TestSearchContract:
    def test_unsupported_triple(self):
        spec = ReductionSpec(
            family="edge",
            source_problem=ProblemId.VERTEX_COVER,
            target_problem=ProblemId.INDEPENDENT_SET,
            edge_gadget=triangle_gadget(),
        )
        with pytest.raises(VerifierError, match="unsupported triple"):
            verify_by_search(spec)

    def test_bound_must_be_positive(self):
        with pytest.raises(VerifierError, match="positive integer"):
            verify_by_search(vc_fvs_spec(triangle_gadget()), max_nodes=0)

    def test_bound_capped_by_subset_oracle(self):
        with pytest.raises(VerifierError, match="exceeds the 10 node oracle"):
            verify_by_search(vc_fvs_spec(triangle_gadget()), max_nodes=11)

    def test_bound_capped_by_cycle_oracle(self):
        with pytest.raises(VerifierError, match="exceeds the 8 node oracle"):
            verify_by_search(path_node_spec(), max_nodes=9)

    def test_largest_legal_bound_accepted(self):
        # an exhausted time budget keeps the run cheap; the bound check
        # itself must pass
        verdict = verify_by_search(
            vc_fvs_spec(triangle_gadget()), max_nodes=10, time_budget=0.0
        )
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 0

    def test_exhausted_budget_reports_completed_bound(self):
        verdict = verify_by_search(
            vc_fvs_spec(triangle_gadget()), max_nodes=6, time_budget=0.0
        )
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 0
        assert "up to 0 nodes" in explain(verdict)

    def test_generous_budget_completes(self):
        verdict = verify_by_search(
            vc_fvs_spec(triangle_gadget()), max_nodes=4, time_budget=600.0
        )
        assert verdict.bound_checked == 4

    def test_fixed_budget_skips_too_small_graphs(self):
        verdict = verify_by_search(universal_node_spec(), max_nodes=2)
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 2

    def test_cycle_sources_start_at_three_nodes(self):
        # two-node directed sources cannot hold a cycle; the path gadget
        # still expands a mutual arc pair into a perfectly fine C6, and
        # treating that as a counterexample would refute a sound gadget
        verdict = verify_by_search(path_node_spec(), max_nodes=2)
        assert verdict.outcome == OUTCOME_CORRECT
        assert verdict.bound_checked == 2


class TestExplain:
    def test_characterization_correct_text(self):
        verdict = verify_vc_to_fvs_edge_gadget(triangle_gadget())
        assert "characterization satisfied" in explain(verdict)

    def test_search_correct_names_the_bound(self):
        verdict = verify_by_search(vc_fvs_spec(triangle_gadget()), max_nodes=3)
        assert explain(verdict) == "No counterexample up to 3 nodes."

    def test_condition_one_text(self):
        verdict = verify_vc_to_fvs_edge_gadget(bare_edge_gadget())
        assert "does not contain a cycle" in explain(verdict)

    def test_negative_gained_text_names_target_solution(self):
        verdict = verify_by_search(identity_node_spec())
        assert "g@v1 -> g@v2 -> g@v3 -> g@v1" in explain(verdict)

    def test_positive_lost_text_names_source_solution(self):
        verdict = verify_by_search(universal_node_spec("NONE"))
        text = explain(verdict)
        assert "{v1, v2, v3}" in text
        assert "positive" in text and "negative" in text

    def test_violation_text_lists_conditions_and_counterexample(self):
        verdict = verify_vc_to_fvs_edge_gadget(lopsided_gadget())
        text = explain(verdict)
        assert "Condition 2" in text
        assert "Counterexample" in text


class TestWireFormat:
    def test_correct_search_verdict_shape(self):
        verdict = verify_by_search(vc_fvs_spec(triangle_gadget()), max_nodes=3)
        obj = verdict_to_obj(verdict)
        assert obj == {
            "outcome": "correct",
            "method": "search",
            "boundChecked": 3,
            "explanation": "No counterexample up to 3 nodes.",
        }
        json.dumps(obj)

    def test_incorrect_verdict_shape(self):
        obj = verdict_to_obj(verify_by_search(identity_node_spec()))
        assert obj["outcome"] == "incorrect"
        assert obj["method"] == "search"
        assert "boundChecked" not in obj
        ce = obj["counterexample"]
        assert ce["direction"] == "negativeGained"
        assert ce["targetWitness"] == ["g@v1", "g@v2", "g@v3"]
        assert "sourceWitness" not in ce
        assert ce["source"]["graph"]["directed"] is True
        assert ce["target"]["graph"]["directed"] is False
        json.dumps(obj)

    def test_violation_verdict_shape(self):
        obj = verdict_to_obj(verify_vc_to_fvs_edge_gadget(bare_edge_gadget()))
        assert obj["outcome"] == "characterizationViolation"
        assert obj["method"] == "characterization"
        assert obj["violations"] == [
            {
                "property": 1,
                "explanation": obj["violations"][0]["explanation"],
            }
        ]
        assert obj["counterexample"]["direction"] == "negativeGained"
        json.dumps(obj)

    def test_verdict_invariants(self):
        ce = verify_by_search(identity_node_spec()).counterexample
        with pytest.raises(VerifierError, match="no counterevidence"):
            VerifierVerdict(OUTCOME_CORRECT, METHOD_SEARCH, 3, counterexample=ce)
        with pytest.raises(VerifierError, match="bound qualified"):
            VerifierVerdict(OUTCOME_CORRECT, METHOD_SEARCH)
        with pytest.raises(VerifierError, match="bound qualified"):
            VerifierVerdict(OUTCOME_CORRECT, METHOD_CHARACTERIZATION, 6)
        with pytest.raises(VerifierError, match="bare counterexample"):
            VerifierVerdict(OUTCOME_INCORRECT, METHOD_SEARCH)
        with pytest.raises(VerifierError, match="failed conditions"):
            VerifierVerdict(OUTCOME_VIOLATION, METHOD_CHARACTERIZATION)
        with pytest.raises(VerifierError, match="only correct search"):
            VerifierVerdict(
                OUTCOME_INCORRECT, METHOD_SEARCH, 4, counterexample=ce
            )

    def test_counterexample_invariants(self):
        ce = verify_by_search(identity_node_spec()).counterexample
        with pytest.raises(VerifierError, match="source witness"):
            Counterexample(ce.source, ce.target, POSITIVE_LOST)
        with pytest.raises(VerifierError, match="target witness"):
            Counterexample(ce.source, ce.target, NEGATIVE_GAINED)
        with pytest.raises(VerifierError, match="unknown direction"):
            Counterexample(ce.source, ce.target, "sideways")


class TestAgreementOnSmallGadgets:
    def test_characterization_matches_search_for_tiny_bodies(self):
        # every labeled body on exactly the two terminals plus at most one
        # extra node; the full five-node sweep lives in the acceptance suite
        labels = ("u", "v", "w")
        pairs = [("u", "v"), ("u", "w"), ("v", "w")]
        for size in (2, 3):
            names = labels[:size]
            usable = [p for p in pairs if p[0] in names and p[1] in names]
            for mask in range(1 << len(usable)):
                edges = [usable[i] for i in range(len(usable)) if mask >> i & 1]
                gadget = EdgeGadget(Graph(False, names, edges), "u", "v")
                by_char = verify_vc_to_fvs_edge_gadget(gadget)
                by_search = verify_by_search(vc_fvs_spec(gadget), max_nodes=4)
                assert (by_char.outcome == OUTCOME_CORRECT) == (
                    by_search.outcome == OUTCOME_CORRECT
                ), serialize_spec(vc_fvs_spec(gadget))

    def test_search_modes_agree_on_an_asymmetric_gadget(self):
        # the lopsided gadget has no terminal swap symmetry, so its scan
        # runs per labeled graph; the replay above already pinned its first
        # counterexample, here the isomorphic-relabel of the gadget body
        # must not change the verdict
        body = Graph(
            False,
            ("u", "v", "x1", "x2"),
            (("u", "v"), ("u", "x1"), ("u", "x2"), ("x1", "x2")),
        )
        relabeled = verify_by_search(
            vc_fvs_spec(EdgeGadget(body, "u", "v")), max_nodes=3
        )
        original = verify_by_search(vc_fvs_spec(lopsided_gadget()), max_nodes=3)
        assert relabeled.counterexample.source == original.counterexample.source
        assert relabeled.counterexample.direction == original.counterexample.direction
        mapped = isomorphic(
            relabeled.counterexample.target.graph,
            original.counterexample.target.graph,
        )
        assert mapped is not None
