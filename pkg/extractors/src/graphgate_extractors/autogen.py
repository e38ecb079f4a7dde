"""Extractor for AutoGen-style team topologies.

Accepts either a team object with a ``participants`` list (a class name
containing "RoundRobin" selects round-robin cycling) or an
``(agents, transitions)`` pair where transitions map an agent (or agent
name) to its allowed successor agents.

Round-robin teams become a LOOP-kind cycle in agent order; explicit
transitions become DIRECT edges. The entry points at the first speaker
and every leaf speaker (no outgoing transitions) is wired to the exit.
Agent kinds come from the class hierarchy: user-proxy classes are HUMAN
gates, tool-bearing agents are TOOL nodes, the rest are LLM steps.
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


def _agent_name(agent) -> str:
    return agent if isinstance(agent, str) else getattr(agent, "name")


def _agent_node(agent) -> NodeSpec:
    name = getattr(agent, "name")
    if "userproxy" in type(agent).__name__.lower():
        return NodeSpec(name, "HUMAN")
    tools = tuple(
        t if isinstance(t, str) else getattr(t, "name")
        for t in (getattr(agent, "tools", ()) or ())
    )
    if tools:
        return NodeSpec(name, "TOOL", tools=tools)
    return NodeSpec(name, "LLM")


def extract_autogen(team) -> ExtractionResult:
    if hasattr(team, "participants"):
        agents = list(team.participants)
        round_robin = "roundrobin" in type(team).__name__.lower()
        transitions = None
    elif isinstance(team, tuple) and len(team) == 2:
        agents = list(team[0])
        transitions = team[1]
        round_robin = False
    else:
        raise ExtractionError(
            "expected a team object with participants or an (agents, transitions) pair"
        )
    if not agents:
        raise ExtractionError("team has no agents")

    nodes = [NodeSpec(ENTRY_ID, "ENTRY"), NodeSpec(EXIT_ID, "EXIT")]
    nodes += [_agent_node(a) for a in agents]
    names = [getattr(a, "name") for a in agents]

    edges = [EdgeSpec(ENTRY_ID, names[0])]
    outgoing: dict[str, list[str]] = {n: [] for n in names}

    if round_robin:
        for a, b in zip(names, names[1:] + names[:1]):
            outgoing[a].append(b)
            edges.append(EdgeSpec(a, b, "LOOP"))
    elif transitions:
        for src, dsts in transitions.items():
            src_name = _agent_name(src)
            if src_name not in outgoing:
                raise ExtractionError(f"transition from unknown agent {src_name!r}")
            for dst in dsts:
                dst_name = _agent_name(dst)
                if dst_name not in outgoing:
                    raise ExtractionError(f"transition to unknown agent {dst_name!r}")
                outgoing[src_name].append(dst_name)
                edges.append(EdgeSpec(src_name, dst_name))

    for name in names:
        if not outgoing[name]:
            edges.append(EdgeSpec(name, EXIT_ID))

    return finalize(nodes, edges, [])
