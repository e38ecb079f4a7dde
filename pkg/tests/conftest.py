import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

from graphgate.graph import AgentGraph, Edge, EdgeKind, Node, NodeKind, load_graph

FIXTURES = TESTS_DIR / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str) -> AgentGraph:
    return load_graph(fixture_path(name).read_bytes())


def quick_graph(spec: str, entry: str, exits: str, edge_kind: EdgeKind = EdgeKind.DIRECT) -> AgentGraph:
    """Tiny graph builder from whitespace-separated tokens.

    Node tokens look like "name:KIND" or "name:TOOL,tool_a,tool_b";
    edge tokens look like "src>dst" (all edges share edge_kind).
    """
    nodes = []
    edges = []
    for token in spec.split():
        if ">" in token:
            src, dst = token.split(">")
            edges.append(Edge(src=src, dst=dst, kind=edge_kind))
        else:
            name, _, kind_spec = token.partition(":")
            kind_name, *tools = kind_spec.split(",") if kind_spec else ("LLM",)
            nodes.append(Node(id=name, kind=NodeKind[kind_name], tools=frozenset(tools)))
    return AgentGraph(
        nodes=tuple(nodes),
        edges=tuple(edges),
        entry=entry,
        exits=frozenset(exits.split(",")) if exits else frozenset(),
    )


@pytest.fixture
def email_triage() -> AgentGraph:
    return load_fixture("email_triage.json")


@pytest.fixture
def round_robin() -> AgentGraph:
    return load_fixture("round_robin.json")
