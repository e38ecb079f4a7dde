"""Runtime policy monitoring over event streams.

Events carry an optional tool name, action type, decision, and a tag
set. A MonitorSession steps every compiled rule once per event via table
lookup, accumulates violations (absorbing), and aggregates the final
decision as the maximum handling level among violated rules. Rules whose
automaton still awaits an obligation when the stream closes are reported
UNRESOLVED; strict-finish mode lets those count toward the decision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .dfa import Dfa, compile_expr
from .policy import Atom, AtomKind, HandlingLevel, PolicyRule, atoms_of, parse_policy_file


@dataclass(frozen=True)
class Event:
    tool_name: Optional[str] = None
    action_type: Optional[str] = None
    decision: Optional[str] = None
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "tags", frozenset(self.tags))

    @classmethod
    def from_dict(cls, obj: dict) -> "Event":
        """Build an Event from a parsed JSON object; unknown keys are ignored."""
        for key in ("tool_name", "action_type", "decision"):
            if obj.get(key) is not None and not isinstance(obj[key], str):
                raise ValueError(f"event field {key!r} must be a string")
        tags = obj.get("tags", [])
        if not isinstance(tags, (list, set, frozenset)) or not all(isinstance(t, str) for t in tags):
            raise ValueError("event field 'tags' must be an array of strings")
        return cls(
            tool_name=obj.get("tool_name"),
            action_type=obj.get("action_type"),
            decision=obj.get("decision"),
            tags=frozenset(tags),
        )


def matches(event: Event, atom: Atom) -> bool:
    if atom.kind is AtomKind.TOOL:
        return event.tool_name == atom.name
    if atom.kind is AtomKind.ACTION:
        return event.action_type == atom.name
    if atom.kind is AtomKind.DECISION:
        return event.decision == atom.name
    return atom.name in event.tags


def valuation_of(event: Event, atoms: Sequence[Atom]) -> int:
    """Bitmask over atoms for one event."""
    v = 0
    for i, atom in enumerate(atoms):
        if matches(event, atom):
            v |= 1 << i
    return v


class RuleStatus:
    OK = "OK"
    VIOLATED = "VIOLATED"
    UNRESOLVED = "UNRESOLVED"


@dataclass(frozen=True)
class Finding:
    rule: str
    level: HandlingLevel
    event_index: int


@dataclass(frozen=True)
class RuleOutcome:
    rule: str
    status: str
    level: HandlingLevel
    event_index: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "status": self.status,
            "level": self.level.name,
            "event_index": self.event_index,
        }


@dataclass(frozen=True)
class Verdict:
    decision: Optional[HandlingLevel]  # None means PASS
    outcomes: tuple[RuleOutcome, ...]
    unmatched_atoms: tuple[str, ...] = ()

    @property
    def decision_label(self) -> str:
        return "PASS" if self.decision is None else self.decision.name

    def to_dict(self) -> dict:
        return {
            "decision": self.decision_label,
            "rules": [o.to_dict() for o in self.outcomes],
            "unmatched_atoms": list(self.unmatched_atoms),
        }


@dataclass(frozen=True)
class EventLogEntry:
    index: int
    matched_atoms: tuple[str, ...]
    finding: Optional[Finding]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "matched_atoms": list(self.matched_atoms),
            "finding": None
            if self.finding is None
            else {"rule": self.finding.rule, "level": self.finding.level.name},
        }


@dataclass
class _RuleState:
    name: str
    dfa: Dfa
    level: HandlingLevel
    state: int
    violated_at: Optional[int] = None
    matched_any: set[Atom] = field(default_factory=set)


class MonitorSession:
    """Single-stream monitor over a fixed compiled rule set."""

    def __init__(
        self,
        rules: Iterable[tuple[str, Dfa, HandlingLevel]],
        strict_finish: bool = False,
    ):
        self._rules = [_RuleState(name, dfa, level, dfa.initial) for name, dfa, level in rules]
        self.strict_finish = strict_finish
        self.event_count = 0
        self.findings: list[Finding] = []
        self._verdict: Optional[Verdict] = None

    @classmethod
    def from_policy_rules(cls, rules: Iterable[PolicyRule], strict_finish: bool = False) -> "MonitorSession":
        return cls(
            ((r.name, compile_expr(r.expr), r.handling) for r in rules),
            strict_finish=strict_finish,
        )

    @property
    def closed(self) -> bool:
        return self._verdict is not None

    def process_event(self, event: Event) -> Optional[Finding]:
        """Advance all live rules one step; return the gravest new finding."""
        if self.closed:
            raise RuntimeError("monitor session is closed")
        index = self.event_count
        self.event_count += 1
        new: list[Finding] = []
        for rs in self._rules:
            if rs.violated_at is not None:
                continue
            v = 0
            for i, atom in enumerate(rs.dfa.atoms):
                if matches(event, atom):
                    v |= 1 << i
                    rs.matched_any.add(atom)
            rs.state = rs.dfa.transitions[rs.state * rs.dfa.valuation_count + v]
            if rs.state in rs.dfa.violating:
                rs.violated_at = index
                finding = Finding(rs.name, rs.level, index)
                self.findings.append(finding)
                new.append(finding)
        if not new:
            return None
        return max(new, key=lambda f: f.level)

    def finish(self) -> Verdict:
        """Close the session and aggregate the decision (idempotent)."""
        if self._verdict is not None:
            return self._verdict
        outcomes = []
        decision: Optional[HandlingLevel] = None
        unmatched: list[str] = []
        for rs in self._rules:
            if rs.violated_at is not None:
                outcomes.append(RuleOutcome(rs.name, RuleStatus.VIOLATED, rs.level, rs.violated_at))
                if decision is None or rs.level > decision:
                    decision = rs.level
            elif rs.state in rs.dfa.pending:
                outcomes.append(RuleOutcome(rs.name, RuleStatus.UNRESOLVED, rs.level))
                if self.strict_finish and (decision is None or rs.level > decision):
                    decision = rs.level
            else:
                outcomes.append(RuleOutcome(rs.name, RuleStatus.OK, rs.level))
            for atom in rs.dfa.atoms:
                if atom not in rs.matched_any:
                    unmatched.append(f"{rs.name}: {atom}")
        self._verdict = Verdict(
            decision=decision,
            outcomes=tuple(outcomes),
            unmatched_atoms=tuple(unmatched),
        )
        return self._verdict


class TraceFileError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def parse_trace(text: str) -> list[Event]:
    """Parse a JSON Lines trace file; blank lines are skipped."""
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFileError(lineno, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise TraceFileError(lineno, "event must be a JSON object")
        try:
            events.append(Event.from_dict(obj))
        except ValueError as exc:
            raise TraceFileError(lineno, str(exc)) from None
    return events


def evaluate_trace(
    rules_path: Union[str, Path],
    trace_path: Union[str, Path],
    strict_finish: bool = False,
) -> tuple[Verdict, list[EventLogEntry]]:
    """Stream a recorded trace through a rules file and aggregate."""
    rules = parse_policy_file(Path(rules_path).read_text(encoding="utf-8"))
    events = parse_trace(Path(trace_path).read_text(encoding="utf-8"))
    session = MonitorSession.from_policy_rules(rules, strict_finish=strict_finish)
    all_atoms: list[Atom] = []
    for rule in rules:
        for atom in atoms_of(rule.expr):
            if atom not in all_atoms:
                all_atoms.append(atom)
    log: list[EventLogEntry] = []
    for i, event in enumerate(events):
        finding = session.process_event(event)
        matched = tuple(sorted(str(a) for a in all_atoms if matches(event, a)))
        log.append(EventLogEntry(index=i, matched_atoms=matched, finding=finding))
    return session.finish(), log
