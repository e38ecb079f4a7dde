"""Static policy verification via a graph x DFA product walk.

Each graph node emits a fixed symbol sequence (one event per declared
tool for TOOL nodes in lexicographic order, otherwise a single event
tagged with the lowercase node kind). A BFS over (node, automaton state)
pairs advances the automaton through a node's symbols when the pair is
dequeued, so a violating pair proves some topological path violates the
rule without executing anything. Pairs are visited at most once, keeping
exploration within |V| * |Q| states; the BFS parent chain doubles as the
witness path.

Conditional, parallel, and loop edges are traversed like direct ones:
the analysis over-approximates runtime behaviour, trading precision for
the guarantee that nothing reachable is missed.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .dfa import Dfa, compile_expr, step
from .graph import AgentGraph, InvalidGraphError, Node, NodeKind, validate_graph
from .monitor import Event, valuation_of
from .policy import PolicyRule


class StaticFindingKind(enum.Enum):
    VIOLATION = "VIOLATION"
    UNRESOLVED_OBLIGATION = "UNRESOLVED_OBLIGATION"


@dataclass(frozen=True)
class StaticViolation:
    rule: str
    kind: StaticFindingKind
    witness: tuple[str, ...]
    product_states_explored: int
    terminal: Optional[str] = None  # "exit" or "dead-end" for unresolved findings

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "kind": self.kind.value,
            "witness": list(self.witness),
            "states_explored": self.product_states_explored,
            "terminal": self.terminal,
        }


def event_symbols(node: Node) -> tuple[Event, ...]:
    """Symbols a node contributes to any trace passing through it.

    TOOL nodes emit one event per declared tool (lexicographic order), so
    an undeclared TOOL node emits nothing; every other node emits a
    single event tagged with its lowercase kind label.
    """
    if node.kind is NodeKind.TOOL:
        return tuple(Event(tool_name=t) for t in sorted(node.tools))
    return (Event(tags=frozenset({node.kind.value.lower()})),)


def verify_static(
    graph: AgentGraph, rule_name: str, dfa: Dfa, stats: Optional[dict] = None
) -> Optional[StaticViolation]:
    """Check one compiled rule against every topological path of the graph.

    Returns the first violation in BFS order, else the first pending
    obligation observed at a terminal node (an exit or a dead end), else
    None. When a dict is passed as `stats`, its "explored" key receives
    the product-state count even for passing runs.
    """
    violations = validate_graph(graph)
    if violations:
        raise InvalidGraphError(violations)

    node_vals: dict[str, tuple[int, ...]] = {
        n.id: tuple(valuation_of(ev, dfa.atoms) for ev in event_symbols(n))
        for n in graph.nodes
    }

    start = (graph.entry, dfa.initial)
    queue: deque[tuple[str, int]] = deque([start])
    parents: dict[tuple[str, int], Optional[tuple[str, int]]] = {start: None}
    explored = 0
    unresolved: Optional[tuple[tuple[str, int], str]] = None  # (product state, terminal kind)

    def witness_path(state: tuple[str, int]) -> tuple[str, ...]:
        path = []
        cur: Optional[tuple[str, int]] = state
        while cur is not None:
            path.append(cur[0])
            cur = parents[cur]
        path.reverse()
        return tuple(path)

    while queue:
        node_id, q = queue.popleft()
        explored += 1
        q2 = q
        for v in node_vals[node_id]:
            q2 = step(dfa, q2, v)
        if q2 in dfa.violating:
            if stats is not None:
                stats["explored"] = explored
            return StaticViolation(
                rule=rule_name,
                kind=StaticFindingKind.VIOLATION,
                witness=witness_path((node_id, q)),
                product_states_explored=explored,
            )
        node = graph.node_by_id[node_id]
        successors = graph.successors[node_id]
        is_terminal = node.kind is NodeKind.EXIT or not successors
        if is_terminal and q2 in dfa.pending and unresolved is None:
            kind = "exit" if node.kind is NodeKind.EXIT else "dead-end"
            unresolved = ((node_id, q), kind)
        for nxt in successors:
            key = (nxt, q2)
            if key not in parents:
                parents[key] = (node_id, q)
                queue.append(key)

    if stats is not None:
        stats["explored"] = explored
    if unresolved is not None:
        state, terminal = unresolved
        return StaticViolation(
            rule=rule_name,
            kind=StaticFindingKind.UNRESOLVED_OBLIGATION,
            witness=witness_path(state),
            product_states_explored=explored,
            terminal=terminal,
        )
    return None


def verify_policy_file(
    graph: AgentGraph, rules: Sequence[PolicyRule]
) -> list[tuple[str, Optional[StaticViolation]]]:
    """Verify each rule independently, in file order."""
    results = []
    for rule in rules:
        dfa = compile_expr(rule.expr)
        results.append((rule.name, verify_static(graph, rule.name, dfa)))
    return results
