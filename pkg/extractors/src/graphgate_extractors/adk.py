"""Extractor for ADK-style composite agent trees.

Composite agents (class names containing Sequential/Parallel/Loop, each
with a ``sub_agents`` list) flatten into SUBGRAPH nodes; leaves carry an
optional ``tools`` list. The tree walk wires:

  sequential  composite -> first child; each child's terminal nodes ->
              the next sibling's representative
  parallel    composite -> every child via PARALLEL edges; the
              composite itself also chains forward (fork/join point),
              alongside every branch end
  loop        children chained as in sequential, then the last child's
              terminals loop back to the composite via a LOOP edge;
              continuation leaves from the composite

"Terminal nodes" of a leaf is the leaf; of a sequential composite, the
last child's terminals; of a parallel composite, the composite plus all
branch terminals; of a loop composite, just the composite. A synthesized
entry points at the root's representative and the root's terminals are
wired to a synthesized exit.
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


def _composite_kind(agent) -> str | None:
    cls = type(agent).__name__.lower()
    if not hasattr(agent, "sub_agents"):
        return None
    for marker in ("sequential", "parallel", "loop"):
        if marker in cls:
            return marker
    return "sequential"  # composite with sub_agents but unnamed flavor


def extract_adk(root) -> ExtractionResult:
    nodes: list[NodeSpec] = [NodeSpec(ENTRY_ID, "ENTRY"), NodeSpec(EXIT_ID, "EXIT")]
    edges: list[EdgeSpec] = []
    diagnostics: list[str] = []

    def leaf_node(agent) -> NodeSpec:
        name = getattr(agent, "name")
        tools = tuple(
            t if isinstance(t, str) else getattr(t, "name")
            for t in (getattr(agent, "tools", ()) or ())
        )
        if tools:
            return NodeSpec(name, "TOOL", tools=tools)
        if "human" in name.lower():
            diagnostics.append(f"agent {name!r}: HUMAN via naming heuristic")
            return NodeSpec(name, "HUMAN")
        return NodeSpec(name, "LLM")

    def walk(agent) -> tuple[str, list[str]]:
        """Emit nodes/edges for a subtree; return (representative, terminals)."""
        kind = _composite_kind(agent)
        name = getattr(agent, "name")
        if kind is None:
            nodes.append(leaf_node(agent))
            return name, [name]

        children = list(agent.sub_agents)
        if not children:
            raise ExtractionError(f"composite agent {name!r} has an empty sub_agents list")
        nodes.append(NodeSpec(name, "SUBGRAPH"))

        if kind == "parallel":
            terminals = [name]
            for child in children:
                rep, child_terms = walk(child)
                edges.append(EdgeSpec(name, rep, "PARALLEL"))
                terminals.extend(child_terms)
            return name, terminals

        # sequential and loop share the internal chain
        reps_terms = [walk(child) for child in children]
        edges.append(EdgeSpec(name, reps_terms[0][0]))
        for (_, prev_terms), (next_rep, _) in zip(reps_terms, reps_terms[1:]):
            for t in prev_terms:
                edges.append(EdgeSpec(t, next_rep))
        if kind == "loop":
            for t in reps_terms[-1][1]:
                edges.append(EdgeSpec(t, name, "LOOP"))
            return name, [name]
        return name, reps_terms[-1][1]

    rep, terminals = walk(root)
    edges.insert(0, EdgeSpec(ENTRY_ID, rep))
    for t in terminals:
        edges.append(EdgeSpec(t, EXIT_ID))
    return finalize(nodes, edges, diagnostics)
