import pytest

from conftest import GOLDEN_DIR
from graphgate_extractors import check_document, score_extraction
from graphgate_extractors.interchange import ExtractionError
from graphgate_extractors.adk import extract_adk
from graphgate_extractors.autogen import extract_autogen
from graphgate_extractors.crewai import extract_crewai
from graphgate_extractors.langgraph import extract_langgraph

import stubs

CASES = [(fw, case) for fw, cases in stubs.ALL_CASES.items() for case in cases]
IDS = [f"{fw}-{case.name}" for fw, case in CASES]


@pytest.mark.parametrize("fw,case", CASES, ids=IDS)
class TestStubSuite:
    def test_document_is_well_formed(self, fw, case):
        result = case.extract(case.workflow)
        assert check_document(result.doc) == []

    def test_perfect_precision_recall(self, fw, case):
        score = score_extraction(case.extract(case.workflow), case.truth)
        assert score.perfect, score

    def test_deterministic_bytes(self, fw, case):
        assert case.extract(case.workflow).document == case.extract(case.workflow).document


@pytest.mark.parametrize(
    "fw,case", [(fw, c) for fw, c in CASES if c.golden], ids=[i for (_, c), i in zip(CASES, IDS) if c.golden]
)
def test_reference_cases_match_committed_goldens(fw, case):
    golden = (GOLDEN_DIR / case.golden).read_bytes()
    assert case.extract(case.workflow).document == golden


class TestLangGraph:
    def test_uncompiled_rejected(self):
        with pytest.raises(ExtractionError, match="get_graph"):
            extract_langgraph(stubs.UncompiledStateGraph())

    def test_missing_sentinels_rejected(self):
        broken = stubs.CompiledStateGraph(nodes=[("begin", None), ("__end__", None)], edges=[])
        with pytest.raises(ExtractionError, match="sentinel"):
            extract_langgraph(broken)

    def test_naming_heuristic_diagnostic(self):
        result = extract_langgraph(stubs.LG_INCIDENT)
        assert any("naming heuristic" in d for d in result.diagnostics)

    def test_interrupt_marker_diagnostic(self):
        case = next(c for c in stubs.LANGGRAPH_CASES if c.name == "interrupt_gate")
        result = extract_langgraph(case.workflow)
        assert any("interrupt marker" in d for d in result.diagnostics)

    def test_branch_labels_dropped_with_diagnostic(self):
        case = next(c for c in stubs.LANGGRAPH_CASES if c.name == "support_router")
        result = extract_langgraph(case.workflow)
        assert sum("branch label" in d for d in result.diagnostics) == 2


class TestCrewai:
    def test_empty_task_list_rejected(self):
        with pytest.raises(ExtractionError, match="no tasks"):
            extract_crewai(stubs.Crew([]))

    def test_hierarchical_router_shape(self):
        case = next(c for c in stubs.CREWAI_CASES if c.name == "hier_support")
        doc = extract_crewai(case.workflow).doc
        manager_edges = [e for e in doc.edges if e.src == "manager"]
        assert manager_edges and all(e.kind == "CONDITIONAL" for e in manager_edges)

    def test_human_input_diagnostic(self):
        case = next(c for c in stubs.CREWAI_CASES if c.name == "human_approval")
        result = extract_crewai(case.workflow)
        assert any("human_input" in d for d in result.diagnostics)

    def test_manager_name_collision_avoided(self):
        crew = stubs.Crew([stubs.Task("manager"), stubs.Task("worker")], process="hierarchical")
        doc = extract_crewai(crew).doc
        routers = [n.id for n in doc.nodes if n.kind == "ROUTER"]
        assert routers == ["manager_"]


class TestAutogen:
    def test_empty_team_rejected(self):
        with pytest.raises(ExtractionError, match="no agents"):
            extract_autogen(stubs.RoundRobinGroupChat([]))

    def test_round_robin_cycles_without_exit_path(self):
        case = next(c for c in stubs.AUTOGEN_CASES if c.name == "round_robin_brainstorm")
        doc = extract_autogen(case.workflow).doc
        assert all(e.dst != "__end__" for e in doc.edges)
        assert sum(1 for e in doc.edges if e.kind == "LOOP") == 3

    def test_unknown_transition_agent_rejected(self):
        team = ([stubs.AssistantAgent("a")], {"ghost": ["a"]})
        with pytest.raises(ExtractionError, match="unknown agent"):
            extract_autogen(team)

    def test_unsupported_shape_rejected(self):
        with pytest.raises(ExtractionError):
            extract_autogen(object())


class TestAdk:
    def test_empty_composite_rejected(self):
        with pytest.raises(ExtractionError, match="empty sub_agents"):
            extract_adk(stubs.SequentialAgent("hollow", []))

    def test_compliance_edge_kind_mix(self):
        doc = extract_adk(stubs.ADK_COMPLIANCE).doc
        kinds = {}
        for e in doc.edges:
            kinds[e.kind] = kinds.get(e.kind, 0) + 1
        assert kinds == {"DIRECT": 12, "PARALLEL": 3, "LOOP": 1}

    def test_single_leaf_wraps_with_sentinels(self):
        doc = extract_adk(stubs.LlmAgent("solo")).doc
        assert len(doc.nodes) == 3
        assert [(e.src, e.dst) for e in sorted(doc.edges, key=lambda e: e.src)] == [
            ("__start__", "solo"),
            ("solo", "__end__"),
        ]

    def test_human_naming_diagnostic(self):
        case = next(c for c in stubs.ADK_CASES if c.name == "human_tree")
        result = extract_adk(case.workflow)
        assert any("naming heuristic" in d for d in result.diagnostics)
