"""graphgate: pre-deployment verification for agent workflow graphs.

Structural safety checks with witness traces, a temporal policy DSL
compiled to table-driven DFAs, static graph x DFA product verification,
and runtime monitoring of event traces.
"""

from .checks import (
    CheckConfig,
    CheckId,
    CheckResult,
    Severity,
    VerificationReport,
    check_dead_ends,
    check_exit_reach_all,
    check_exit_reachability,
    check_human_gate,
    check_human_gate_coverage,
    check_router_shape,
    check_tool_declarations,
    run_all_checks,
)
from .dfa import Dfa, compile_expr, product, run, step, trace_oracle
from .graph import (
    AgentGraph,
    Edge,
    EdgeKind,
    GraphFormatError,
    InvalidGraphError,
    Node,
    NodeKind,
    load_graph,
    reachable_from,
    reverse_reachable,
    save_graph,
    shortest_path,
    validate_graph,
)
from .monitor import (
    Event,
    HandlingLevel,
    MonitorSession,
    Verdict,
    evaluate_trace,
    valuation_of,
)
from .policy import (
    And,
    Atom,
    AtomKind,
    Bounded,
    Chain,
    Forbidden,
    ImplFuture,
    Or,
    ParseError,
    PolicyExpr,
    PolicyRule,
    Until,
    format_expr,
    parse,
    parse_policy_file,
    tokenize,
)
from .static_verifier import (
    StaticFindingKind,
    StaticViolation,
    event_symbols,
    verify_policy_file,
    verify_static,
)

__version__ = "0.1.0"
