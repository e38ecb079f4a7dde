import random

import pytest

import oracles
from conftest import fixture_path, load_fixture, quick_graph
from graphgate.dfa import VerdictStatus, compile_expr, step, trace_oracle, valuation_of_atoms
from graphgate.graph import AgentGraph, InvalidGraphError, Node, NodeKind
from graphgate.monitor import matches
from graphgate.policy import atoms_of, parse, parse_policy_file
from graphgate.static_verifier import (
    StaticFindingKind,
    event_symbols,
    verify_policy_file,
    verify_static,
)


class TestEventSymbols:
    def test_tool_node_lexicographic(self):
        node = Node("t", NodeKind.TOOL, tools=frozenset({"b", "a"}))
        assert [e.tool_name for e in event_symbols(node)] == ["a", "b"]

    def test_human_node_kind_tag(self):
        assert event_symbols(Node("h", NodeKind.HUMAN))[0].tags == {"human"}

    def test_entry_exit_tags(self):
        assert event_symbols(Node("s", NodeKind.ENTRY))[0].tags == {"entry"}
        assert event_symbols(Node("e", NodeKind.EXIT))[0].tags == {"exit"}

    def test_undeclared_tool_node_emits_nothing(self):
        assert event_symbols(Node("t", NodeKind.TOOL)) == ()


def path_trace(graph: AgentGraph, path, atoms):
    trace = []
    for nid in path:
        for event in event_symbols(graph.node_by_id[nid]):
            trace.append(frozenset(a for a in atoms if matches(event, a)))
    return trace


class TestVerifyStatic:
    def test_product_bound_on_twelve_node_fixture(self):
        graph = load_fixture("incident_bridge.json")
        assert len(graph.nodes) == 12
        dfa = compile_expr(parse("G !tool:drop_table"))
        assert dfa.state_count == 2
        stats = {}
        finding = verify_static(graph, "no_destructive_ops", dfa, stats=stats)
        assert finding is None
        assert stats["explored"] <= 24

    def test_vacuous_pass_without_matching_atoms(self):
        graph = load_fixture("gated_pipeline.json")
        assert verify_static(graph, "r", compile_expr(parse("G !tool:launch_missiles"))) is None

    def test_forbidden_violation_with_witness(self):
        graph = load_fixture("incident_bridge.json")
        dfa = compile_expr(parse("G !tool:page_oncall"))
        finding = verify_static(graph, "no_paging", dfa)
        assert finding is not None
        assert finding.kind is StaticFindingKind.VIOLATION
        assert finding.witness == ("__start__", "intake", "triage_router", "page_oncall")

    def test_unresolved_obligation_at_dead_end(self, email_triage):
        dfa = compile_expr(parse("tool:draft_email -> F tool:human_review"))
        finding = verify_static(email_triage, "email_review", dfa)
        assert finding is not None
        assert finding.kind is StaticFindingKind.UNRESOLVED_OBLIGATION
        assert finding.terminal == "dead-end"
        assert finding.witness == (
            "__start__",
            "classify",
            "router",
            "normal_handler",
            "draft_response",
        )

    def test_unresolved_obligation_at_exit(self):
        g = quick_graph(
            "s:ENTRY t:TOOL,draft_email e:EXIT s>t t>e", entry="s", exits="e"
        )
        finding = verify_static(g, "r", compile_expr(parse("tool:draft_email -> F tool:human_review")))
        assert finding is not None
        assert finding.kind is StaticFindingKind.UNRESOLVED_OBLIGATION
        assert finding.terminal == "exit"

    def test_discharged_obligation_passes(self):
        # HUMAN nodes emit the tag "human", so a tag atom sees the gate.
        graph = load_fixture("incident_bridge.json")
        finding = verify_static(graph, "r", compile_expr(parse("tool:draft_email -> F human")))
        assert finding is None

    def test_invalid_graph_rejected(self):
        g = AgentGraph(nodes=(Node("a", NodeKind.LLM),), edges=(), entry="a", exits=frozenset())
        with pytest.raises(InvalidGraphError):
            verify_static(g, "r", compile_expr(parse("G !x")))


class TestVerifyPolicyFile:
    def test_core_rules_on_email_triage(self, email_triage):
        rules = parse_policy_file(fixture_path("core.policies").read_text())
        results = verify_policy_file(email_triage, rules)
        assert [name for name, _ in results] == [r.name for r in rules]
        by_name = dict(results)
        assert by_name["no_destructive_ops"] is None
        assert by_name["email_review"] is not None
        assert by_name["email_review"].kind is StaticFindingKind.UNRESOLVED_OBLIGATION
        assert by_name["pii_anonymize"] is None
        assert by_name["deploy_approval"] is None
        assert by_name["draft_review_send"] is None

    def test_empty_policy_list(self, email_triage):
        assert verify_policy_file(email_triage, []) == []


class TestWitnessReplay:
    def test_witness_replays_to_reported_state(self):
        rng = random.Random(31)
        pool = ("drop_table", "draft_email", "human_review", "deploy", "approve")
        exprs = [
            parse("G !tool:drop_table"),
            parse("tool:draft_email -> F tool:human_review"),
            parse("tool:deploy -> F[<=2] tool:approve"),
            parse("(G !tool:drop_table) AND (tool:deploy -> F tool:approve)"),
        ]
        replayed = 0
        for _ in range(150):
            g = oracles.random_dag(rng, tool_pool=pool)
            for expr in exprs:
                dfa = compile_expr(expr)
                finding = verify_static(g, "r", dfa)
                if finding is None:
                    continue
                replayed += 1
                state = dfa.initial
                for nid in finding.witness:
                    for event in event_symbols(g.node_by_id[nid]):
                        state = step(dfa, state, valuation_of_atoms(dfa.atoms, frozenset(
                            a for a in dfa.atoms if matches(event, a)
                        )))
                if finding.kind is StaticFindingKind.VIOLATION:
                    assert state in dfa.violating
                else:
                    assert state in dfa.pending
                # Witness must be a real connected path from the entry.
                assert finding.witness[0] == g.entry
                for a, b in zip(finding.witness, finding.witness[1:]):
                    assert b in g.successors[a]
        assert replayed > 30


class TestEnumerationEquivalence:
    def test_static_matches_maximal_path_oracle_on_dags(self):
        rng = random.Random(77)
        pool = ("drop_table", "draft_email", "human_review", "deploy", "approve", "fetch_pii", "anonymize")
        rules = parse_policy_file(fixture_path("core.policies").read_text())
        for _ in range(120):
            g = oracles.random_dag(rng, tool_pool=pool)
            paths = list(oracles.maximal_traces(g, unroll=12))
            for rule in rules:
                atoms = atoms_of(rule.expr)
                dfa = compile_expr(rule.expr)
                stats = {}
                finding = verify_static(g, rule.name, dfa, stats=stats)
                assert stats["explored"] <= len(g.nodes) * dfa.state_count
                verdicts = {
                    trace_oracle(rule.expr, path_trace(g, p, atoms)).status for p in paths
                }
                if finding is None:
                    assert verdicts == {VerdictStatus.SATISFIED}
                elif finding.kind is StaticFindingKind.VIOLATION:
                    assert VerdictStatus.VIOLATED in verdicts
                else:
                    assert VerdictStatus.VIOLATED not in verdicts
                    assert VerdictStatus.PENDING in verdicts
