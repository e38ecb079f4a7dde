"""Extractor for CrewAI-style task pipelines.

Expects a crew object with a ``tasks`` list and a ``process`` mode
("sequential" or "hierarchical"). Tasks carry ``name``, optionally
``tools`` (strings or objects with a ``name``), optionally ``context``
(other task objects they depend on), and optionally a ``human_input``
flag marking a human approval step.

Sequential crews become an entry->t1->...->tn->exit chain; hierarchical
crews synthesize a "manager" ROUTER with a conditional edge to every
task and each task wired to the exit. Context dependencies add direct
edges either way.
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


def _task_kind(task, diagnostics: list[str]) -> NodeSpec:
    name = getattr(task, "name")
    tools = tuple(
        t if isinstance(t, str) else getattr(t, "name") for t in (getattr(task, "tools", ()) or ())
    )
    if getattr(task, "human_input", False):
        diagnostics.append(f"task {name!r}: HUMAN via human_input flag")
        return NodeSpec(name, "HUMAN")
    if tools:
        return NodeSpec(name, "TOOL", tools=tools)
    return NodeSpec(name, "LLM")


def extract_crewai(crew) -> ExtractionResult:
    tasks = list(getattr(crew, "tasks", ()) or ())
    if not tasks:
        raise ExtractionError("crew has no tasks")
    process = str(getattr(crew, "process", "sequential")).lower()
    hierarchical = "hierarchical" in process

    diagnostics: list[str] = []
    nodes = [NodeSpec(ENTRY_ID, "ENTRY"), NodeSpec(EXIT_ID, "EXIT")]
    nodes += [_task_kind(t, diagnostics) for t in tasks]
    names = [getattr(t, "name") for t in tasks]

    edges: list[EdgeSpec] = []
    seen: set[tuple[str, str, str]] = set()

    def add(src: str, dst: str, kind: str = "DIRECT") -> None:
        key = (src, dst, kind)
        if key not in seen:
            seen.add(key)
            edges.append(EdgeSpec(src, dst, kind))

    if hierarchical:
        manager = "manager"
        while manager in names:
            manager += "_"
        nodes.append(NodeSpec(manager, "ROUTER"))
        add(ENTRY_ID, manager)
        for name in names:
            add(manager, name, "CONDITIONAL")
            add(name, EXIT_ID)
    else:
        add(ENTRY_ID, names[0])
        for a, b in zip(names, names[1:]):
            add(a, b)
        add(names[-1], EXIT_ID)

    for task in tasks:
        for dep in getattr(task, "context", ()) or ():
            add(getattr(dep, "name"), getattr(task, "name"))

    return finalize(nodes, edges, diagnostics)
