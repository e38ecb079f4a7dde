"""Synthetic-graph scalability harness.

Generates deterministic random workflow graphs (spanning backbone from
the entry plus uniform extra edges, so every generated graph is
defect-free), times the structural check suite per size, and times
compilation plus evaluation of a fixed five-rule policy set over 1,000
synthetic events. Emits a CSV report and a log-log scaling figure.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from .checks import CheckConfig, run_all_checks
from .dfa import compile_expr
from .graph import AgentGraph, Edge, EdgeKind, Node, NodeKind
from .monitor import Event, MonitorSession
from .policy import parse_policy_file

DEFAULT_SIZES = (50, 100, 200, 500, 1000, 2000, 5000)
DEFAULT_DENSITY = 2.0
DEFAULT_TRIALS = 10
DEFAULT_SEED = 42

# Middle-node kind weights; routers force conditional out-edges, tools get
# generated names, so every check code path is exercised.
KIND_WEIGHTS = (
    (NodeKind.LLM, 60),
    (NodeKind.TOOL, 25),
    (NodeKind.ROUTER, 10),
    (NodeKind.HUMAN, 3),
    (NodeKind.PASSTHROUGH, 2),
)

# Fixed policy set for monitor timing: one of each commonly used form.
BENCH_RULES = """\
no_destructive_ops | halt | G !tool:drop_table
email_review | escalate | tool:draft_email -> F tool:human_review
pii_anonymize | block | tool:fetch_pii -> F[<=3] tool:anonymize
deploy_approval | halt | tool:deploy -> F tool:approve
draft_review_send | warn | tool:draft -> F tool:review -> F tool:send
"""

EVENT_COUNT = 1000


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    density: float = DEFAULT_DENSITY
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if any(n < 2 for n in self.sizes):
            raise ValueError("sizes must be >= 2")
        if self.density < 1.0:
            raise ValueError("density must be >= 1.0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class BenchRow:
    nodes: int
    edges: int
    structural_ms: float
    monitor_compile_ms: float
    monitor_eval_ms: float


def gen_synthetic(n: int, density: float, seed: int) -> AgentGraph:
    """Deterministic random workflow graph with n nodes.

    A random arborescence rooted at the entry guarantees reachability;
    out-degree-zero middles are wired to the exit so there are no dead
    ends; extra uniform edges bring the count to ~density*n.
    """
    if n < 2:
        raise ValueError("need at least an entry and an exit node")
    rng = random.Random(f"{n}:{density}:{seed}")
    ids = ["entry"] + [f"n{i:05d}" for i in range(1, n - 1)] + ["exit"]

    kinds = {"entry": NodeKind.ENTRY, "exit": NodeKind.EXIT}
    population = [k for k, _ in KIND_WEIGHTS]
    weights = [w for _, w in KIND_WEIGHTS]
    for nid in ids[1:-1]:
        kinds[nid] = rng.choices(population, weights)[0]

    nodes = []
    for i, nid in enumerate(ids):
        tools = frozenset({f"tool_{i}"}) if kinds[nid] is NodeKind.TOOL else frozenset()
        nodes.append(Node(id=nid, kind=kinds[nid], tools=tools))

    def edge_kind(src: str) -> EdgeKind:
        return EdgeKind.CONDITIONAL if kinds[src] is NodeKind.ROUTER else EdgeKind.DIRECT

    triples: set[tuple[str, str]] = set()
    edges: list[Edge] = []

    def add(src: str, dst: str) -> None:
        if (src, dst) in triples:
            return
        triples.add((src, dst))
        edges.append(Edge(src=src, dst=dst, kind=edge_kind(src)))

    # Spanning backbone: each node hangs off a random earlier node.
    for i in range(1, n):
        add(ids[rng.randrange(i)], ids[i])

    # No middle node may dangle; route leaves to the exit.
    out_deg = {nid: 0 for nid in ids}
    for e in edges:
        out_deg[e.src] += 1
    for nid in ids[:-1]:
        if out_deg[nid] == 0:
            add(nid, "exit")

    target = round(density * n * 1.05)
    attempts = 0
    while len(edges) < target and attempts < 20 * target:
        attempts += 1
        src = ids[rng.randrange(n - 1)]  # never from the exit
        dst = ids[rng.randrange(1, n)]  # never into the entry
        if src != dst:
            add(src, dst)

    return AgentGraph(nodes=tuple(nodes), edges=tuple(edges), entry="entry", exits=frozenset({"exit"}))


def _gen_events(seed: int) -> list[Event]:
    rng = random.Random(f"events:{seed}")
    tags = ["audit", "log", "retry", "cache"]
    events = []
    for _ in range(EVENT_COUNT):
        events.append(
            Event(
                tool_name=f"tool_bench_{rng.randrange(16)}",
                action_type=f"act_{rng.randrange(8)}",
                tags=frozenset(rng.sample(tags, rng.randrange(3))),
            )
        )
    return events


def run_bench(config: BenchConfig = BenchConfig()) -> list[BenchRow]:
    rules = parse_policy_file(BENCH_RULES)
    events = _gen_events(config.seed)
    rows = []
    for n in config.sizes:
        graph = gen_synthetic(n, config.density, config.seed)

        structural = []
        for _ in range(config.trials):
            t0 = time.perf_counter()
            run_all_checks(graph, CheckConfig())
            structural.append((time.perf_counter() - t0) * 1000.0)

        t0 = time.perf_counter()
        compiled = [(r.name, compile_expr(r.expr), r.handling) for r in rules]
        compile_ms = (time.perf_counter() - t0) * 1000.0

        evals = []
        for _ in range(config.trials):
            session = MonitorSession(compiled)
            t0 = time.perf_counter()
            for event in events:
                session.process_event(event)
            evals.append((time.perf_counter() - t0) * 1000.0)

        rows.append(
            BenchRow(
                nodes=n,
                edges=len(graph.edges),
                structural_ms=statistics.median(structural),
                monitor_compile_ms=compile_ms,
                monitor_eval_ms=statistics.median(evals),
            )
        )
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    lines = ["nodes,edges,structural_ms,monitor_compile_ms,monitor_eval_ms"]
    for r in rows:
        lines.append(
            f"{r.nodes},{r.edges},{r.structural_ms:.3f},{r.monitor_compile_ms:.3f},{r.monitor_eval_ms:.3f}"
        )
    return "\n".join(lines) + "\n"


def write_report(rows: Sequence[BenchRow], out_dir: Union[str, Path]) -> tuple[Path, Path]:
    """Write bench.csv and a log-log scaling figure; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "bench.csv"
    csv_path.write_text(rows_to_csv(rows), encoding="utf-8")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [r.nodes for r in rows]
    ax.plot(xs, [r.structural_ms for r in rows], marker="o", label="structural checks")
    ax.plot(xs, [r.monitor_eval_ms for r in rows], marker="s", label=f"monitor eval ({EVENT_COUNT} events)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("nodes")
    ax.set_ylabel("time (ms)")
    ax.set_title("Verification time vs. graph size")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig_path = out / "scaling.png"
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return csv_path, fig_path
