"""Structural safety checks over workflow graphs, with witness paths.

Seven checks run in a fixed order: exit reachability, exit reachability
from everywhere (livelock detection), dead ends, router edge shape, human
gate presence, human gate coverage of sensitive tools, and tool
declarations. Failing reachability-style checks carry a concrete witness
path starting at the entry node.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .graph import (
    AgentGraph,
    EdgeKind,
    InvalidGraphError,
    NodeKind,
    bfs_layers,
    reachable_from,
    reverse_reachable,
    shortest_path,
    validate_graph,
)

UNREACHABLE_MARKER = "⊣ unreachable: {target}"


class CheckId(enum.Enum):
    EXIT_REACH = "EXIT_REACH"
    EXIT_REACH_ALL = "EXIT_REACH_ALL"
    NO_DEAD_ENDS = "NO_DEAD_ENDS"
    ROUTER_SHAPE = "ROUTER_SHAPE"
    HUMAN_GATE = "HUMAN_GATE"
    HUMAN_GATE_COVERAGE = "HUMAN_GATE_COVERAGE"
    TOOL_DECLARATIONS = "TOOL_DECLARATIONS"


class Severity(enum.Enum):
    CRITICAL = "CRITICAL"
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"
    LOW = "LOW"


SEVERITY: dict[CheckId, Severity] = {
    CheckId.EXIT_REACH: Severity.CRITICAL,
    CheckId.EXIT_REACH_ALL: Severity.CRITICAL,
    CheckId.NO_DEAD_ENDS: Severity.HIGH,
    CheckId.ROUTER_SHAPE: Severity.MEDIUM,
    CheckId.HUMAN_GATE: Severity.HIGH,
    CheckId.HUMAN_GATE_COVERAGE: Severity.HIGH,
    CheckId.TOOL_DECLARATIONS: Severity.LOW,
}


@dataclass(frozen=True)
class CheckConfig:
    require_human: bool = False
    sensitive_tools: frozenset[str] = frozenset()
    suppressions: Mapping[CheckId, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sensitive_tools", frozenset(self.sensitive_tools))
        object.__setattr__(
            self, "suppressions", {k: frozenset(v) for k, v in self.suppressions.items()}
        )

    def suppressed(self, check: CheckId) -> frozenset[str]:
        return self.suppressions.get(check, frozenset())


@dataclass(frozen=True)
class CheckResult:
    check: CheckId
    passed: bool
    severity: Severity
    offenders: tuple[str, ...] = ()
    witness: Optional[tuple[str, ...]] = None
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "check": self.check.value,
            "passed": self.passed,
            "severity": self.severity.value,
            "offenders": list(self.offenders),
            "witness": list(self.witness) if self.witness is not None else None,
            "message": self.message,
        }


@dataclass(frozen=True)
class VerificationReport:
    graph_name: str
    results: tuple[CheckResult, ...]
    overall_passed: bool

    def to_dict(self) -> dict:
        return {
            "graph": self.graph_name,
            "checks": [r.to_dict() for r in self.results],
            "overall_passed": self.overall_passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"{status} {r.check.value} [{r.severity.value}] {r.message}")
            if not r.passed and r.witness is not None:
                lines.append("    witness: " + " -> ".join(r.witness))
        lines.append(f"overall: {'PASS' if self.overall_passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _suppression_note(n: int) -> str:
    return f" ({n} offender{'s' if n != 1 else ''} suppressed)" if n else ""


def _result(
    check: CheckId,
    offenders: list[str],
    n_suppressed: int,
    fail_message: str,
    pass_message: str,
    witness: Optional[list[str]] = None,
) -> CheckResult:
    note = _suppression_note(n_suppressed)
    if offenders:
        return CheckResult(
            check=check,
            passed=False,
            severity=SEVERITY[check],
            offenders=tuple(sorted(offenders)),
            witness=tuple(witness) if witness else None,
            message=fail_message + note,
        )
    return CheckResult(check=check, passed=True, severity=SEVERITY[check], message=pass_message + note)


def _deepest_reachable(graph: AgentGraph) -> str:
    layers = bfs_layers(graph, graph.entry)
    return layers[-1][0]


def check_exit_reachability(graph: AgentGraph, config: CheckConfig = CheckConfig()) -> CheckResult:
    """Every declared exit must be reachable from the entry."""
    reach = reachable_from(graph, graph.entry)
    suppressed = config.suppressed(CheckId.EXIT_REACH)
    offenders = sorted(x for x in graph.exits - reach if x not in suppressed)
    n_suppressed = len(graph.exits - reach) - len(offenders)
    witness = None
    if offenders:
        path = shortest_path(graph, graph.entry, _deepest_reachable(graph)) or [graph.entry]
        witness = path + [UNREACHABLE_MARKER.format(target=offenders[0])]
    return _result(
        CheckId.EXIT_REACH,
        offenders,
        n_suppressed,
        f"{len(offenders)} exit(s) unreachable from entry: {', '.join(offenders)}",
        "all exits reachable from entry",
        witness,
    )


def check_exit_reach_all(graph: AgentGraph, config: CheckConfig = CheckConfig()) -> CheckResult:
    """Every node reachable from the entry must itself reach some exit."""
    reach = reachable_from(graph, graph.entry)
    can_finish = reverse_reachable(graph, graph.exits) if graph.exits else set()
    suppressed = config.suppressed(CheckId.EXIT_REACH_ALL)
    livelocked = reach - can_finish
    offenders = sorted(n for n in livelocked if n not in suppressed)
    witness = None
    if offenders:
        witness = shortest_path(graph, graph.entry, offenders[0])
    return _result(
        CheckId.EXIT_REACH_ALL,
        offenders,
        len(livelocked) - len(offenders),
        f"{len(offenders)} reachable node(s) cannot reach any exit: {', '.join(offenders)}",
        "every reachable node can reach an exit",
        witness,
    )


def check_dead_ends(graph: AgentGraph, config: CheckConfig = CheckConfig()) -> CheckResult:
    """Non-exit nodes must have at least one outgoing edge."""
    suppressed = config.suppressed(CheckId.NO_DEAD_ENDS)
    dead = sorted(
        n.id for n in graph.nodes if n.kind is not NodeKind.EXIT and graph.out_degree(n.id) == 0
    )
    offenders = [n for n in dead if n not in suppressed]
    witness = None
    if offenders:
        reach = reachable_from(graph, graph.entry)
        for nid in offenders:
            if nid in reach:
                witness = shortest_path(graph, graph.entry, nid)
                break
    return _result(
        CheckId.NO_DEAD_ENDS,
        offenders,
        len(dead) - len(offenders),
        f"{len(offenders)} dead-end node(s): {', '.join(offenders)}",
        "no dead-end nodes",
        witness,
    )


def check_router_shape(graph: AgentGraph, config: CheckConfig = CheckConfig()) -> CheckResult:
    """All edges leaving a ROUTER node must be CONDITIONAL."""
    routers = {n.id for n in graph.nodes if n.kind is NodeKind.ROUTER}
    suppressed = config.suppressed(CheckId.ROUTER_SHAPE)
    bad = [
        e
        for e in graph.edges
        if e.src in routers and e.kind is not EdgeKind.CONDITIONAL and e.src not in suppressed
    ]
    n_all = sum(1 for e in graph.edges if e.src in routers and e.kind is not EdgeKind.CONDITIONAL)
    offenders = [f"{e.src} -> {e.dst} [{e.kind.value}]" for e in bad]
    return _result(
        CheckId.ROUTER_SHAPE,
        offenders,
        n_all - len(offenders),
        f"{len(offenders)} non-conditional router edge(s): {'; '.join(sorted(offenders))}",
        "all router out-edges are conditional",
    )


def check_human_gate(graph: AgentGraph, config: CheckConfig) -> CheckResult:
    """At least one HUMAN node must exist when the config requires it."""
    check = CheckId.HUMAN_GATE
    if not config.require_human:
        return CheckResult(check, True, SEVERITY[check], message="skipped: not required")
    humans = sorted(n.id for n in graph.nodes if n.kind is NodeKind.HUMAN)
    if humans:
        return CheckResult(
            check, True, SEVERITY[check], message=f"human gate present: {', '.join(humans)}"
        )
    return CheckResult(
        check, False, SEVERITY[check], message="no HUMAN node in graph but human gate required"
    )


def check_human_gate_coverage(graph: AgentGraph, config: CheckConfig) -> CheckResult:
    """No path from entry may reach a sensitive tool while avoiding every HUMAN node."""
    check = CheckId.HUMAN_GATE_COVERAGE
    if not config.sensitive_tools:
        return CheckResult(check, True, SEVERITY[check], message="skipped: no sensitive tools configured")

    humans = {n.id for n in graph.nodes if n.kind is NodeKind.HUMAN}
    stripped = AgentGraph(
        nodes=tuple(n for n in graph.nodes if n.id not in humans),
        edges=tuple(e for e in graph.edges if e.src not in humans and e.dst not in humans),
        entry=graph.entry,
        exits=graph.exits - humans,
    )
    if graph.entry in humans:
        return CheckResult(check, True, SEVERITY[check], message="entry is a human gate")
    reach = reachable_from(stripped, stripped.entry)
    suppressed = config.suppressed(check)
    exposed_all = sorted(
        n.id
        for n in stripped.nodes
        if n.id in reach and n.tools & config.sensitive_tools
    )
    offenders = [n for n in exposed_all if n not in suppressed]
    witness = shortest_path(stripped, stripped.entry, offenders[0]) if offenders else None
    return _result(
        check,
        offenders,
        len(exposed_all) - len(offenders),
        f"sensitive tool node(s) reachable without a human gate: {', '.join(offenders)}",
        "all paths to sensitive tools pass a human gate",
        witness,
    )


def check_tool_declarations(graph: AgentGraph, config: CheckConfig = CheckConfig()) -> CheckResult:
    """TOOL nodes must declare a nonempty tool set."""
    suppressed = config.suppressed(CheckId.TOOL_DECLARATIONS)
    undeclared = sorted(n.id for n in graph.nodes if n.kind is NodeKind.TOOL and not n.tools)
    offenders = [n for n in undeclared if n not in suppressed]
    return _result(
        CheckId.TOOL_DECLARATIONS,
        offenders,
        len(undeclared) - len(offenders),
        f"{len(offenders)} TOOL node(s) without declared tools: {', '.join(offenders)}",
        "all TOOL nodes declare their tools",
    )


_CHECK_FNS = {
    CheckId.EXIT_REACH: check_exit_reachability,
    CheckId.EXIT_REACH_ALL: check_exit_reach_all,
    CheckId.NO_DEAD_ENDS: check_dead_ends,
    CheckId.ROUTER_SHAPE: check_router_shape,
    CheckId.HUMAN_GATE: check_human_gate,
    CheckId.HUMAN_GATE_COVERAGE: check_human_gate_coverage,
    CheckId.TOOL_DECLARATIONS: check_tool_declarations,
}


def run_all_checks(
    graph: AgentGraph, config: CheckConfig = CheckConfig(), graph_name: str = "<graph>"
) -> VerificationReport:
    """Run the seven checks in fixed order over a validated graph."""
    violations = validate_graph(graph)
    if violations:
        raise InvalidGraphError(violations)
    results = tuple(_CHECK_FNS[check](graph, config) for check in CheckId)
    return VerificationReport(
        graph_name=graph_name,
        results=results,
        overall_passed=all(r.passed for r in results),
    )
