from graphgate.bench import (
    BenchConfig,
    BenchRow,
    gen_synthetic,
    rows_to_csv,
    run_bench,
    write_report,
)
from graphgate.checks import CheckConfig, CheckId, run_all_checks
from graphgate.graph import validate_graph

import pytest


class TestGenSynthetic:
    def test_deterministic(self):
        assert gen_synthetic(60, 2.0, 7) == gen_synthetic(60, 2.0, 7)

    def test_different_seed_differs(self):
        assert gen_synthetic(60, 2.0, 7) != gen_synthetic(60, 2.0, 8)

    def test_edge_count_band_at_fifty(self):
        g = gen_synthetic(50, 2.0, 42)
        assert 95 <= len(g.edges) <= 115

    def test_edge_count_self_calibrated_at_scale(self):
        g = gen_synthetic(5000, 2.0, 42)
        target = round(2.0 * 5000 * 1.05)
        assert abs(len(g.edges) - target) / target <= 0.05

    def test_generated_graphs_are_valid_and_defect_free(self):
        for n in (2, 5, 50, 200):
            g = gen_synthetic(n, 2.0, 3)
            assert validate_graph(g) == []
            report = run_all_checks(g, CheckConfig())
            assert report.overall_passed, [r for r in report.results if not r.passed]

    def test_exit_reach_always_passes(self):
        for seed in range(5):
            g = gen_synthetic(80, 2.0, seed)
            by_id = {r.check: r for r in run_all_checks(g).results}
            assert by_id[CheckId.EXIT_REACH].passed
            assert by_id[CheckId.EXIT_REACH_ALL].passed

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            gen_synthetic(1, 2.0, 1)


class TestRunBench:
    def test_small_sweep_rows(self):
        rows = run_bench(BenchConfig(sizes=(50, 100), trials=2, seed=1))
        assert [r.nodes for r in rows] == [50, 100]
        assert all(r.structural_ms >= 0 for r in rows)
        assert all(r.monitor_eval_ms > 0 for r in rows)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BenchConfig(sizes=(1,))
        with pytest.raises(ValueError):
            BenchConfig(density=0.5)
        with pytest.raises(ValueError):
            BenchConfig(trials=0)

    def test_csv_shape(self):
        rows = [BenchRow(50, 104, 0.5, 0.1, 4.0)]
        csv = rows_to_csv(rows)
        lines = csv.strip().splitlines()
        assert lines[0] == "nodes,edges,structural_ms,monitor_compile_ms,monitor_eval_ms"
        assert lines[1].startswith("50,104,0.500,")

    def test_write_report_emits_csv_and_figure(self, tmp_path):
        rows = run_bench(BenchConfig(sizes=(50,), trials=1, seed=1))
        csv_path, fig_path = write_report(rows, tmp_path / "out")
        assert csv_path.read_text().startswith("nodes,edges")
        assert fig_path.suffix == ".png"
        assert fig_path.stat().st_size > 1000

    def test_structural_time_roughly_linear(self):
        # Doubling n at fixed density should not quadruple check time.
        # Small sizes are timing noise, so start at 500 nodes.
        rows = run_bench(BenchConfig(sizes=(500, 1000, 2000), trials=5, seed=2))
        for prev, cur in zip(rows, rows[1:]):
            assert cur.structural_ms / max(prev.structural_ms, 1e-6) <= 4.0, (prev, cur)
