"""Workflow graph model, interchange format, and reachability primitives.

The graph is a directed multigraph with typed nodes and edges, a unique
entry node, and a set of exit nodes. Graphs are immutable after
construction; all operations here are pure functions, and every traversal
expands neighbors in lexicographic id order so results (and the witnesses
built on top of them) are deterministic.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Iterable, Mapping, Optional, Sequence, Union


class NodeKind(enum.Enum):
    ENTRY = "ENTRY"
    EXIT = "EXIT"
    TOOL = "TOOL"
    LLM = "LLM"
    ROUTER = "ROUTER"
    HUMAN = "HUMAN"
    SUBGRAPH = "SUBGRAPH"
    PASSTHROUGH = "PASSTHROUGH"


class EdgeKind(enum.Enum):
    DIRECT = "DIRECT"
    CONDITIONAL = "CONDITIONAL"
    PARALLEL = "PARALLEL"
    LOOP = "LOOP"


class GraphFormatError(ValueError):
    """Malformed interchange document (syntax, schema, or unknown labels)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class InvalidGraphError(ValueError):
    """Graph violates a structural well-formedness invariant."""

    def __init__(self, violations: Sequence[str]):
        self.violations = tuple(violations)
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    tools: frozenset[str] = frozenset()
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "tools", frozenset(self.tools))
        object.__setattr__(self, "metadata", dict(self.metadata))


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.src, self.dst, self.kind.value)


@dataclass(frozen=True)
class AgentGraph:
    """Typed workflow graph: nodes, edges, one entry id, set of exit ids.

    Nodes and edges are normalized to lexicographic order on construction,
    so structurally equal graphs compare equal regardless of input order.
    """

    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    entry: str
    exits: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.id)))
        object.__setattr__(
            self, "edges", tuple(sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind.value)))
        )
        object.__setattr__(self, "exits", frozenset(self.exits))

    @cached_property
    def node_by_id(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        """Deduplicated successor ids per node, sorted lexicographically."""
        out: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        for e in self.edges:
            if e.src in out:
                out[e.src].add(e.dst)
        return {nid: tuple(sorted(dsts)) for nid, dsts in out.items()}

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        inc: dict[str, set[str]] = {n.id: set() for n in self.nodes}
        for e in self.edges:
            if e.dst in inc:
                inc[e.dst].add(e.src)
        return {nid: tuple(sorted(srcs)) for nid, srcs in inc.items()}

    def out_degree(self, node_id: str) -> int:
        return len(self.successors[node_id])


def validate_graph(graph: AgentGraph) -> list[str]:
    """Return all well-formedness violations (empty list == valid graph).

    Violations are data, not exceptions: each entry names the offending
    node or edge and the invariant it breaks.
    """
    violations: list[str] = []

    seen: dict[str, int] = {}
    for node in graph.nodes:
        seen[node.id] = seen.get(node.id, 0) + 1
    for nid, count in sorted(seen.items()):
        if count > 1:
            violations.append(f"duplicate node id {nid!r} ({count} occurrences)")

    for node in graph.nodes:
        if not node.id:
            violations.append("empty node id")
        if "\n" in node.id:
            violations.append(f"node id {node.id!r} contains a newline")
        if node.tools and node.kind is not NodeKind.TOOL:
            violations.append(
                f"node {node.id!r} declares tools but has kind {node.kind.value} (tools allowed on TOOL nodes only)"
            )

    entry_nodes = sorted(n.id for n in graph.nodes if n.kind is NodeKind.ENTRY)
    if graph.entry not in seen:
        violations.append(f"entry {graph.entry!r} is not a node in the graph")
    elif graph.node_by_id[graph.entry].kind is not NodeKind.ENTRY:
        violations.append(f"entry {graph.entry!r} has kind {graph.node_by_id[graph.entry].kind.value}, expected ENTRY")
    if len(entry_nodes) > 1:
        violations.append(f"multiple ENTRY nodes: {', '.join(entry_nodes)}")
    elif len(entry_nodes) == 1 and entry_nodes[0] != graph.entry:
        violations.append(f"ENTRY-kind node {entry_nodes[0]!r} is not the declared entry {graph.entry!r}")

    exit_kind = {n.id for n in graph.nodes if n.kind is NodeKind.EXIT}
    for xid in sorted(graph.exits):
        if xid not in seen:
            violations.append(f"exit {xid!r} is not a node in the graph")
        elif xid not in exit_kind:
            violations.append(f"exit {xid!r} has kind {graph.node_by_id[xid].kind.value}, expected EXIT")
    for xid in sorted(exit_kind - graph.exits):
        violations.append(f"EXIT-kind node {xid!r} is not listed in the exit set")

    edge_seen: set[tuple[str, str, str]] = set()
    for e in graph.edges:
        if e.src not in seen:
            violations.append(f"edge {e.src!r} -> {e.dst!r}: unknown source node")
        if e.dst not in seen:
            violations.append(f"edge {e.src!r} -> {e.dst!r}: unknown destination node")
        if e.triple in edge_seen:
            violations.append(f"duplicate edge {e.src!r} -> {e.dst!r} [{e.kind.value}]")
        edge_seen.add(e.triple)

    return violations


_REQUIRED_TOP = ("version", "entry", "exits", "nodes", "edges")


def _parse_node(obj: object, index: int) -> Node:
    if not isinstance(obj, dict):
        raise GraphFormatError(f"nodes[{index}] is not an object")
    for key in ("id", "kind"):
        if key not in obj:
            raise GraphFormatError(f"nodes[{index}] missing required field {key!r}")
    nid = obj["id"]
    if not isinstance(nid, str):
        raise GraphFormatError(f"nodes[{index}].id must be a string")
    try:
        kind = NodeKind(obj["kind"])
    except ValueError:
        raise GraphFormatError(f"node {nid!r}: unknown node kind {obj['kind']!r}") from None
    tools = obj.get("tools", [])
    if not isinstance(tools, list) or not all(isinstance(t, str) for t in tools):
        raise GraphFormatError(f"node {nid!r}: tools must be an array of strings")
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()
    ):
        raise GraphFormatError(f"node {nid!r}: metadata must be a string-to-string object")
    return Node(id=nid, kind=kind, tools=frozenset(tools), metadata=metadata)


def _parse_edge(obj: object, index: int) -> Edge:
    if not isinstance(obj, dict):
        raise GraphFormatError(f"edges[{index}] is not an object")
    for key in ("src", "dst", "kind"):
        if key not in obj:
            raise GraphFormatError(f"edges[{index}] missing required field {key!r}")
    if not isinstance(obj["src"], str) or not isinstance(obj["dst"], str):
        raise GraphFormatError(f"edges[{index}]: src and dst must be strings")
    try:
        kind = EdgeKind(obj["kind"])
    except ValueError:
        raise GraphFormatError(
            f"edge {obj['src']!r} -> {obj['dst']!r}: unknown edge kind {obj['kind']!r}"
        ) from None
    return Edge(src=obj["src"], dst=obj["dst"], kind=kind)


def load_graph(source: Union[bytes, str, IO[bytes]]) -> AgentGraph:
    """Parse an interchange document into an AgentGraph.

    Does not run validate_graph; callers decide whether and when to
    enforce well-formedness. Unknown object keys are ignored.
    """
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        try:
            text = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"document is not valid UTF-8: {exc}") from None
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(exc.msg, line=exc.lineno, column=exc.colno) from None

    if not isinstance(doc, dict):
        raise GraphFormatError("top-level value must be an object")
    for key in _REQUIRED_TOP:
        if key not in doc:
            raise GraphFormatError(f"missing required field {key!r}")
    if doc["version"] != 1:
        raise GraphFormatError(f"unsupported version {doc['version']!r} (expected 1)")
    if not isinstance(doc["entry"], str):
        raise GraphFormatError("entry must be a string")
    if not isinstance(doc["exits"], list) or not all(isinstance(x, str) for x in doc["exits"]):
        raise GraphFormatError("exits must be an array of strings")
    if not isinstance(doc["nodes"], list):
        raise GraphFormatError("nodes must be an array")
    if not isinstance(doc["edges"], list):
        raise GraphFormatError("edges must be an array")

    nodes = tuple(_parse_node(n, i) for i, n in enumerate(doc["nodes"]))
    edges = tuple(_parse_edge(e, i) for i, e in enumerate(doc["edges"]))
    return AgentGraph(nodes=nodes, edges=edges, entry=doc["entry"], exits=frozenset(doc["exits"]))


def save_graph(graph: AgentGraph) -> bytes:
    """Serialize a valid graph to canonical interchange bytes.

    Output is deterministic: nodes and edges in lexicographic order, keys
    in fixed order, sorted tool/exit arrays and metadata keys. Saving the
    same graph twice yields identical bytes.
    """
    violations = validate_graph(graph)
    if violations:
        raise InvalidGraphError(violations)
    doc = {
        "version": 1,
        "entry": graph.entry,
        "exits": sorted(graph.exits),
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "tools": sorted(n.tools),
                "metadata": {k: n.metadata[k] for k in sorted(n.metadata)},
            }
            for n in graph.nodes
        ],
        "edges": [{"src": e.src, "dst": e.dst, "kind": e.kind.value} for e in graph.edges],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _require_nodes(graph: AgentGraph, ids: Iterable[str]) -> None:
    for nid in ids:
        if nid not in graph.node_by_id:
            raise KeyError(f"unknown node id {nid!r}")


def reachable_from(graph: AgentGraph, start: str) -> set[str]:
    """All nodes with a directed path from start (start included)."""
    _require_nodes(graph, [start])
    seen = {start}
    queue = deque([start])
    succ = graph.successors
    while queue:
        nid = queue.popleft()
        for nxt in succ[nid]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def reverse_reachable(graph: AgentGraph, targets: Iterable[str]) -> set[str]:
    """All nodes from which some target is reachable (targets included)."""
    targets = sorted(set(targets))
    _require_nodes(graph, targets)
    seen = set(targets)
    queue = deque(targets)
    pred = graph.predecessors
    while queue:
        nid = queue.popleft()
        for prv in pred[nid]:
            if prv not in seen:
                seen.add(prv)
                queue.append(prv)
    return seen


def shortest_path(graph: AgentGraph, src: str, dst: str) -> Optional[list[str]]:
    """A shortest directed path src..dst inclusive, or None if unreachable.

    BFS with lexicographic neighbor expansion, so tie-breaking (and
    therefore every witness built from this) is deterministic.
    """
    _require_nodes(graph, [src, dst])
    if src == dst:
        return [src]
    parent: dict[str, str] = {}
    seen = {src}
    queue = deque([src])
    succ = graph.successors
    while queue:
        nid = queue.popleft()
        for nxt in succ[nid]:
            if nxt in seen:
                continue
            parent[nxt] = nid
            if nxt == dst:
                path = [dst]
                while path[-1] != src:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            seen.add(nxt)
            queue.append(nxt)
    return None


def bfs_layers(graph: AgentGraph, start: str) -> list[list[str]]:
    """BFS layers from start; each layer sorted lexicographically."""
    _require_nodes(graph, [start])
    layers = [[start]]
    seen = {start}
    succ = graph.successors
    while True:
        frontier: set[str] = set()
        for nid in layers[-1]:
            for nxt in succ[nid]:
                if nxt not in seen:
                    frontier.add(nxt)
        if not frontier:
            return layers
        seen.update(frontier)
        layers.append(sorted(frontier))
