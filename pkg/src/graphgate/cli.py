"""Command-line front end: check, policy, monitor, and bench subcommands.

Exit codes form the machine contract for CI gates:

    0   all checks / policies / traces pass
    1   structural check failure (or graph fails well-formedness)
    2   static policy violation or unresolved obligation
    3   runtime monitor violation
    64  usage error
    65  input parse error
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bench import BenchConfig, rows_to_csv, run_bench, write_report
from .checks import CheckConfig, CheckId, run_all_checks
from .graph import AgentGraph, GraphFormatError, load_graph, validate_graph
from .monitor import TraceFileError, evaluate_trace
from .policy import PolicyFileError, parse_policy_file
from .static_verifier import StaticFindingKind, verify_policy_file

EX_OK = 0
EX_STRUCTURAL = 1
EX_POLICY = 2
EX_MONITOR = 3
EX_USAGE = 64
EX_DATAERR = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise _UsageError(message)


def _parse_suppression(value: str) -> tuple[CheckId, str]:
    check_name, sep, node = value.partition(":")
    if not sep or not node:
        raise argparse.ArgumentTypeError(f"expected CHECK:node, got {value!r}")
    try:
        check = CheckId(check_name)
    except ValueError:
        valid = ", ".join(c.value for c in CheckId)
        raise argparse.ArgumentTypeError(f"unknown check {check_name!r} (one of: {valid})")
    return check, node


def _parse_sizes(value: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(part) for part in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")
    if not sizes or any(n < 2 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be integers >= 2")
    return sizes


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def build_parser() -> _Parser:
    parser = _Parser(prog="graphgate", description="Workflow graph verification gate")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="run structural checks on a graph file")
    p_check.add_argument("graph", help="interchange graph document")
    p_check.add_argument("--require-human", action="store_true")
    p_check.add_argument("--sensitive-tools", default="", metavar="NAME[,NAME...]")
    p_check.add_argument(
        "--suppress",
        action="append",
        default=[],
        type=_parse_suppression,
        metavar="CHECK:NODE",
        help="drop a node from a check's offender set (repeatable)",
    )
    p_check.add_argument("--format", choices=("json", "text"), default="text")

    p_policy = sub.add_parser("policy", help="statically verify a policy file against a graph")
    p_policy.add_argument("graph")
    p_policy.add_argument("policies", help="rules file: name | handling | expression")
    p_policy.add_argument(
        "--strict-finish",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="count unresolved obligations as failures (default: on)",
    )
    p_policy.add_argument("--format", choices=("json", "text"), default="text")

    p_monitor = sub.add_parser("monitor", help="evaluate a recorded event trace against rules")
    p_monitor.add_argument("policies")
    p_monitor.add_argument("trace", help="JSON Lines event trace")
    p_monitor.add_argument(
        "--strict-finish",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="count unresolved obligations toward the decision (default: off)",
    )
    p_monitor.add_argument("--format", choices=("json", "text"), default="text")

    p_bench = sub.add_parser("bench", help="run the synthetic scalability sweep")
    p_bench.add_argument("--sizes", type=_parse_sizes, default=BenchConfig().sizes)
    p_bench.add_argument("--density", type=float, default=BenchConfig().density)
    p_bench.add_argument("--trials", type=int, default=BenchConfig().trials)
    p_bench.add_argument("--seed", type=int, default=BenchConfig().seed)
    p_bench.add_argument("--out", metavar="DIR", help="write bench.csv and scaling.png here")

    return parser


def _load_valid_graph(path: str) -> tuple[Optional[AgentGraph], Optional[int]]:
    graph = load_graph(_read(path).encode("utf-8"))
    violations = validate_graph(graph)
    if violations:
        for v in violations:
            print(f"invalid graph: {v}", file=sys.stderr)
        return None, EX_STRUCTURAL
    return graph, None


def cmd_check(args) -> int:
    graph, err = _load_valid_graph(args.graph)
    if err is not None:
        return err
    suppressions: dict[CheckId, set[str]] = {}
    for check, node in args.suppress:
        suppressions.setdefault(check, set()).add(node)
    config = CheckConfig(
        require_human=args.require_human,
        sensitive_tools=frozenset(t for t in args.sensitive_tools.split(",") if t),
        suppressions={k: frozenset(v) for k, v in suppressions.items()},
    )
    report = run_all_checks(graph, config, graph_name=args.graph)
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    return EX_OK if report.overall_passed else EX_STRUCTURAL


def cmd_policy(args) -> int:
    graph, err = _load_valid_graph(args.graph)
    if err is not None:
        return err
    rules = parse_policy_file(_read(args.policies))
    results = verify_policy_file(graph, rules)
    failing = [
        (name, finding)
        for name, finding in results
        if finding is not None
        and (args.strict_finish or finding.kind is StaticFindingKind.VIOLATION)
    ]
    if args.format == "json":
        doc = {
            "graph": args.graph,
            "temporal_static": [
                {"rule": name, "passed": finding is None}
                | ({} if finding is None else finding.to_dict())
                for name, finding in results
            ],
            "overall_passed": not failing,
        }
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        for name, finding in results:
            if finding is None:
                print(f"PASS {name}")
            else:
                terminal = f" at {finding.terminal}" if finding.terminal else ""
                print(f"FAIL {name} [{finding.kind.value}]{terminal}")
                print("    witness: " + " -> ".join(finding.witness))
                print(f"    product states explored: {finding.product_states_explored}")
        print(f"overall: {'PASS' if not failing else 'FAIL'}")
    return EX_OK if not failing else EX_POLICY


def cmd_monitor(args) -> int:
    verdict, log = evaluate_trace(args.policies, args.trace, strict_finish=args.strict_finish)
    if args.format == "json":
        doc = verdict.to_dict()
        doc["events"] = [entry.to_dict() for entry in log]
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        for entry in log:
            if entry.finding is not None:
                print(f"event {entry.index}: VIOLATION {entry.finding.rule} [{entry.finding.level.name}]")
        for outcome in verdict.outcomes:
            where = f" at event {outcome.event_index}" if outcome.event_index is not None else ""
            print(f"{outcome.status} {outcome.rule} [{outcome.level.name}]{where}")
        print(f"decision: {verdict.decision_label}")
    for note in verdict.unmatched_atoms:
        print(f"note: atom never matched: {note}", file=sys.stderr)
    violated = any(o.status == "VIOLATED" for o in verdict.outcomes)
    failed = violated or (args.strict_finish and verdict.decision is not None)
    return EX_MONITOR if failed else EX_OK


def cmd_bench(args) -> int:
    try:
        config = BenchConfig(sizes=tuple(args.sizes), density=args.density, trials=args.trials, seed=args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc))
    rows = run_bench(config)
    sys.stdout.write(rows_to_csv(rows))
    if args.out:
        csv_path, fig_path = write_report(rows, args.out)
        print(f"wrote {csv_path} and {fig_path}", file=sys.stderr)
    return EX_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    try:
        if args.command == "check":
            return cmd_check(args)
        if args.command == "policy":
            return cmd_policy(args)
        if args.command == "monitor":
            return cmd_monitor(args)
        return cmd_bench(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except (GraphFormatError, PolicyFileError, TraceFileError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EX_DATAERR
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EX_DATAERR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
