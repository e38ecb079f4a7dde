"""Extractor for compiled LangGraph-style state graphs.

Expects the workflow to expose ``get_graph()`` returning a drawable
graph object with a ``nodes`` mapping (name -> node, where the node's
``data`` may carry a ``tools`` list) and an ``edges`` sequence of
objects with ``source``, ``target``, a ``conditional`` flag, and an
optional branch-label ``data`` attribute. Start/end sentinels must use
the ``__start__``/``__end__`` naming convention.

Node kinds are inferred, in order: interrupt markers on the workflow
(``interrupt_before``/``interrupt_after``) mark HUMAN gates; tool
bindings mark TOOL nodes; names containing "human" mark HUMAN gates (a
heuristic, so a diagnostic is emitted); sources of conditional edges
become ROUTER; everything else is an LLM step.
"""

from __future__ import annotations

from .interchange import (
    ENTRY_ID,
    EXIT_ID,
    EdgeSpec,
    ExtractionError,
    ExtractionResult,
    NodeSpec,
    finalize,
)


def _node_tools(node) -> tuple[str, ...]:
    data = getattr(node, "data", None)
    tools = getattr(data, "tools", None) or getattr(node, "tools", None)
    if not tools:
        return ()
    return tuple(t if isinstance(t, str) else getattr(t, "name") for t in tools)


def extract_langgraph(workflow) -> ExtractionResult:
    get_graph = getattr(workflow, "get_graph", None)
    if get_graph is None:
        raise ExtractionError(
            "workflow object exposes no compiled graph (expected a get_graph() method)"
        )
    graph = get_graph()
    node_map = dict(getattr(graph, "nodes", {}) or {})
    edge_list = list(getattr(graph, "edges", ()) or ())
    if ENTRY_ID not in node_map or EXIT_ID not in node_map:
        raise ExtractionError(
            f"unknown sentinel convention: expected {ENTRY_ID!r} and {EXIT_ID!r} nodes"
        )

    interrupts: set[str] = set()
    for attr in ("interrupt_before", "interrupt_after"):
        interrupts.update(getattr(workflow, attr, ()) or ())

    conditional_sources = {
        getattr(e, "source") for e in edge_list if getattr(e, "conditional", False)
    }

    diagnostics: list[str] = []
    nodes: list[NodeSpec] = []
    for name, node in node_map.items():
        if name == ENTRY_ID:
            nodes.append(NodeSpec(name, "ENTRY"))
            continue
        if name == EXIT_ID:
            nodes.append(NodeSpec(name, "EXIT"))
            continue
        tools = _node_tools(node)
        if name in interrupts:
            diagnostics.append(f"node {name!r}: HUMAN via interrupt marker")
            nodes.append(NodeSpec(name, "HUMAN"))
        elif tools:
            nodes.append(NodeSpec(name, "TOOL", tools=tools))
        elif "human" in name.lower():
            diagnostics.append(f"node {name!r}: HUMAN via naming heuristic")
            nodes.append(NodeSpec(name, "HUMAN"))
        elif name in conditional_sources:
            nodes.append(NodeSpec(name, "ROUTER"))
        else:
            nodes.append(NodeSpec(name, "LLM"))

    edges: list[EdgeSpec] = []
    for e in edge_list:
        kind = "CONDITIONAL" if getattr(e, "conditional", False) else "DIRECT"
        label = getattr(e, "data", None)
        if label is not None:
            diagnostics.append(
                f"edge {getattr(e, 'source')!r} -> {getattr(e, 'target')!r}: branch label {label!r} dropped"
            )
        edges.append(EdgeSpec(getattr(e, "source"), getattr(e, "target"), kind))

    return finalize(nodes, edges, diagnostics)
