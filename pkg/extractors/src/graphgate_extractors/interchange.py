"""Workflow graph interchange document model and canonical serializer.

This package deliberately does not depend on the verification core; the
JSON document format is the only contract between the two. The
serializer here must stay byte-compatible with the core's canonical
form: keys in fixed order, nodes and edges lexicographically sorted,
sorted tool arrays and metadata keys, two-space indent, trailing
newline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

NODE_KINDS = frozenset(
    {"ENTRY", "EXIT", "TOOL", "LLM", "ROUTER", "HUMAN", "SUBGRAPH", "PASSTHROUGH"}
)
EDGE_KINDS = frozenset({"DIRECT", "CONDITIONAL", "PARALLEL", "LOOP"})

ENTRY_ID = "__start__"
EXIT_ID = "__end__"


class ExtractionError(ValueError):
    """Workflow object does not match the expected framework surface."""


@dataclass(frozen=True)
class NodeSpec:
    id: str
    kind: str
    tools: tuple[str, ...] = ()
    metadata: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class EdgeSpec:
    src: str
    dst: str
    kind: str = "DIRECT"


@dataclass(frozen=True)
class GraphDoc:
    entry: str
    exits: tuple[str, ...]
    nodes: tuple[NodeSpec, ...]
    edges: tuple[EdgeSpec, ...]

    def to_bytes(self) -> bytes:
        doc = {
            "version": 1,
            "entry": self.entry,
            "exits": sorted(set(self.exits)),
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind,
                    "tools": sorted(set(n.tools)),
                    "metadata": {k: n.metadata[k] for k in sorted(n.metadata)},
                }
                for n in sorted(self.nodes, key=lambda n: n.id)
            ],
            "edges": [
                {"src": e.src, "dst": e.dst, "kind": e.kind}
                for e in sorted(self.edges, key=lambda e: (e.src, e.dst, e.kind))
            ],
        }
        return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def check_document(doc: GraphDoc) -> list[str]:
    """Internal sanity pass mirroring the core's well-formedness rules."""
    problems: list[str] = []
    ids = [n.id for n in doc.nodes]
    if len(set(ids)) != len(ids):
        problems.append("duplicate node ids")
    by_id = {n.id: n for n in doc.nodes}
    for n in doc.nodes:
        if n.kind not in NODE_KINDS:
            problems.append(f"unknown node kind {n.kind!r} on {n.id!r}")
        if n.tools and n.kind != "TOOL":
            problems.append(f"tools declared on non-TOOL node {n.id!r}")
    entries = [n.id for n in doc.nodes if n.kind == "ENTRY"]
    if entries != [doc.entry]:
        problems.append(f"entry mismatch: declared {doc.entry!r}, ENTRY nodes {entries}")
    exit_nodes = {n.id for n in doc.nodes if n.kind == "EXIT"}
    if set(doc.exits) != exit_nodes:
        problems.append("exit set does not match EXIT-kind nodes")
    seen = set()
    for e in doc.edges:
        if e.kind not in EDGE_KINDS:
            problems.append(f"unknown edge kind {e.kind!r}")
        if e.src not in by_id or e.dst not in by_id:
            problems.append(f"dangling edge {e.src!r} -> {e.dst!r}")
        key = (e.src, e.dst, e.kind)
        if key in seen:
            problems.append(f"duplicate edge {key}")
        seen.add(key)
    return problems


@dataclass(frozen=True)
class ExtractionResult:
    doc: GraphDoc
    diagnostics: tuple[str, ...] = ()

    @property
    def document(self) -> bytes:
        return self.doc.to_bytes()


def finalize(
    nodes: list[NodeSpec], edges: list[EdgeSpec], diagnostics: list[str]
) -> ExtractionResult:
    """Assemble, sanity-check, and wrap an extracted graph."""
    doc = GraphDoc(
        entry=ENTRY_ID,
        exits=(EXIT_ID,),
        nodes=tuple(nodes),
        edges=tuple(edges),
    )
    problems = check_document(doc)
    if problems:
        raise ExtractionError("extracted graph is malformed: " + "; ".join(problems))
    return ExtractionResult(doc=doc, diagnostics=tuple(diagnostics))
