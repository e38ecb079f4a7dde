import random

import pytest

from conftest import fixture_path
from graphgate.dfa import VerdictStatus, trace_oracle
from graphgate.monitor import (
    Event,
    HandlingLevel,
    MonitorSession,
    RuleStatus,
    TraceFileError,
    evaluate_trace,
    matches,
    parse_trace,
    valuation_of,
)
from graphgate.policy import Atom, AtomKind, atoms_of, parse, parse_policy_file

CORE = fixture_path("core.policies")
TRACES = fixture_path("traces")


def session_for(*rule_lines, strict=False):
    rules = parse_policy_file("\n".join(rule_lines))
    return MonitorSession.from_policy_rules(rules, strict_finish=strict)


class TestValuation:
    def test_tool_match(self):
        atoms = (Atom(AtomKind.TOOL, "deploy"), Atom(AtomKind.TOOL, "approve"))
        assert valuation_of(Event(tool_name="deploy"), atoms) == 0b01

    def test_tag_membership(self):
        atoms = (Atom(AtomKind.TAG, "audit"),)
        assert valuation_of(Event(tags=frozenset({"audit", "log"})), atoms) == 0b1

    def test_empty_event_matches_nothing(self):
        atoms = (
            Atom(AtomKind.TOOL, "x"),
            Atom(AtomKind.ACTION, "x"),
            Atom(AtomKind.DECISION, "x"),
            Atom(AtomKind.TAG, "x"),
        )
        assert valuation_of(Event(), atoms) == 0

    def test_action_and_decision(self):
        event = Event(action_type="write", decision="approved")
        assert matches(event, Atom(AtomKind.ACTION, "write"))
        assert matches(event, Atom(AtomKind.DECISION, "approved"))
        assert not matches(event, Atom(AtomKind.TAG, "write"))


class TestProcessEvent:
    def test_forbidden_tool_halts(self):
        session = session_for("no_destructive_ops | halt | G !tool:drop_table")
        finding = session.process_event(Event(tool_name="drop_table"))
        assert finding is not None
        assert finding.level is HandlingLevel.HALT
        assert finding.event_index == 0

    def test_benign_event_no_finding(self):
        session = session_for("no_destructive_ops | halt | G !tool:drop_table")
        assert session.process_event(Event(tool_name="read")) is None

    def test_highest_new_finding_returned(self):
        session = session_for(
            "w | warn | G !tool:bad",
            "e | escalate | G !tool:bad",
        )
        finding = session.process_event(Event(tool_name="bad"))
        assert finding.level is HandlingLevel.ESCALATE
        assert len(session.findings) == 2

    def test_closed_session_rejects_events(self):
        session = session_for("r | warn | G !x")
        session.finish()
        with pytest.raises(RuntimeError):
            session.process_event(Event())

    def test_violated_rules_stay_violated(self):
        session = session_for("r | halt | G !tool:bad")
        session.process_event(Event(tool_name="bad"))
        session.process_event(Event(tool_name="good"))
        verdict = session.finish()
        assert verdict.outcomes[0].status == RuleStatus.VIOLATED
        assert verdict.outcomes[0].event_index == 0


class TestFinish:
    def test_pending_reported_unresolved(self):
        session = session_for("r | escalate | tool:draft_email -> F tool:human_review")
        session.process_event(Event(tool_name="draft_email"))
        verdict = session.finish()
        assert verdict.outcomes[0].status == RuleStatus.UNRESOLVED
        assert verdict.decision_label == "PASS"

    def test_strict_finish_promotes_unresolved(self):
        session = session_for(
            "r | escalate | tool:draft_email -> F tool:human_review", strict=True
        )
        session.process_event(Event(tool_name="draft_email"))
        assert session.finish().decision is HandlingLevel.ESCALATE

    def test_decision_is_max_level(self):
        session = session_for(
            "w | warn | G !tool:bad",
            "e | escalate | G !tool:bad",
            "ok | halt | G !tool:never_used",
        )
        session.process_event(Event(tool_name="bad"))
        verdict = session.finish()
        assert verdict.decision is HandlingLevel.ESCALATE

    def test_finish_idempotent(self):
        session = session_for("r | warn | G !x")
        assert session.finish() is session.finish()

    def test_unmatched_atoms_noted(self):
        session = session_for("r | warn | G !tool:ghost")
        session.process_event(Event(tool_name="real"))
        verdict = session.finish()
        assert verdict.unmatched_atoms == ("r: tool:ghost",)


class TestTraceFiles:
    def test_parse_trace(self):
        events = parse_trace('{"tool_name": "a"}\n\n{"tags": ["x"], "extra": 1}\n')
        assert events[0].tool_name == "a"
        assert events[1].tags == {"x"}

    def test_malformed_line_numbered(self):
        with pytest.raises(TraceFileError, match="line 2"):
            parse_trace('{"tool_name": "a"}\n{nope}\n')

    def test_non_object_line(self):
        with pytest.raises(TraceFileError, match="line 1"):
            parse_trace("[1,2]\n")

    def test_bad_tags_type(self):
        with pytest.raises(TraceFileError, match="tags"):
            parse_trace('{"tags": "oops"}\n')


class TestEvaluateTrace:
    def test_happy_path_passes(self):
        verdict, log = evaluate_trace(CORE, TRACES / "happy_path.jsonl")
        assert verdict.decision_label == "PASS"
        assert all(o.status == RuleStatus.OK or o.status == RuleStatus.UNRESOLVED for o in verdict.outcomes)
        assert all(entry.finding is None for entry in log)

    def test_happy_path_strict_still_passes(self):
        verdict, _ = evaluate_trace(CORE, TRACES / "happy_path.jsonl", strict_finish=True)
        assert verdict.decision_label == "PASS"

    def test_forbidden_tool_trace_halts(self):
        verdict, log = evaluate_trace(CORE, TRACES / "forbidden_tool.jsonl")
        assert verdict.decision is HandlingLevel.HALT
        assert log[1].finding is not None and log[1].finding.rule == "no_destructive_ops"

    def test_change_control_violation_halts(self):
        verdict, _ = evaluate_trace(CORE, TRACES / "policy_violation.jsonl")
        outcomes = {o.rule: o for o in verdict.outcomes}
        assert outcomes["deploy_approval"].status == RuleStatus.VIOLATED
        assert verdict.decision is HandlingLevel.HALT

    def test_repeated_trigger_escalates(self):
        verdict, _ = evaluate_trace(CORE, TRACES / "escalation.jsonl")
        assert verdict.decision is HandlingLevel.ESCALATE

    def test_event_log_matched_atoms(self):
        _, log = evaluate_trace(CORE, TRACES / "forbidden_tool.jsonl")
        assert log[0].matched_atoms == ()
        assert log[1].matched_atoms == ("tool:drop_table",)

    def test_empty_trace_no_rules(self, tmp_path):
        rules = tmp_path / "empty.policies"
        rules.write_text("# nothing\n")
        trace = tmp_path / "empty.jsonl"
        trace.write_text("")
        verdict, log = evaluate_trace(rules, trace)
        assert verdict.decision_label == "PASS"
        assert log == []


class TestThroughputShape:
    def test_thousand_benign_events_zero_findings(self):
        import time

        rules = parse_policy_file(CORE.read_text())
        session = MonitorSession.from_policy_rules(rules)
        events = [Event(tool_name=f"benign_{i % 16}") for i in range(1000)]
        t0 = time.perf_counter()
        for e in events:
            session.process_event(e)
        elapsed = time.perf_counter() - t0
        assert session.findings == []
        assert session.finish().decision_label == "PASS"
        assert elapsed < 1.0  # generous; the bench pins the real budget


class TestMonotonicity:
    def test_violated_set_only_grows(self):
        rng = random.Random(5)
        rules = parse_policy_file(CORE.read_text())
        tools = ["drop_table", "draft_email", "human_review", "deploy", "approve", "noise"]
        for _ in range(30):
            session = MonitorSession.from_policy_rules(rules)
            seen: set[str] = set()
            for _ in range(15):
                session.process_event(Event(tool_name=rng.choice(tools)))
                now = {f.rule for f in session.findings}
                assert seen <= now
                seen = now


class TestOracleEquivalence:
    def test_verdicts_match_trace_oracle(self):
        rules = parse_policy_file(CORE.read_text())
        rng = random.Random(99)
        tools = ["drop_table", "draft_email", "human_review", "deploy", "approve",
                 "fetch_pii", "anonymize", "draft", "review", "send", "noise"]
        for _ in range(300):
            events = [Event(tool_name=rng.choice(tools)) for _ in range(rng.randint(0, 6))]
            session = MonitorSession.from_policy_rules(rules)
            for e in events:
                session.process_event(e)
            verdict = session.finish()
            for rule, outcome in zip(rules, verdict.outcomes):
                atoms = atoms_of(rule.expr)
                trace = [frozenset(a for a in atoms if matches(e, a)) for e in events]
                expected = trace_oracle(rule.expr, trace)
                if expected.status is VerdictStatus.VIOLATED:
                    assert outcome.status == RuleStatus.VIOLATED
                    assert outcome.event_index == expected.index
                elif expected.status is VerdictStatus.PENDING:
                    assert outcome.status == RuleStatus.UNRESOLVED
                else:
                    assert outcome.status == RuleStatus.OK
