"""Integration tests for ReportAgent and the run bundle it writes."""

import json

import pytest

from implicit_bounds.agents.report_agent import SECTION_ORDER, ReportAgent, default_run_id
from implicit_bounds.core.audit.evidence import read_output, undocumented_columns, validate_required_artifacts
from implicit_bounds.core.tools import ToolResult

EXPECTED_OUTPUTS = {
    "landscape",
    "bounds_vs_n",
    "bounds_vs_delta",
    "sample_complexity",
    "lipschitz_table",
    "loss_lipschitz",
    "lipschitz_validation",
    "empirical_suprema",
    "lambda_sensitivity",
    "qg_certificate",
    "sandwich",
    "zero_set",
    "graph_vs_prediction",
    "training",
    "training_curves",
    "generalization_gap",
    "epsilon_tradeoff",
    "dt_scaling",
}


class FailingTool:
    name = "BoundCurveTool"

    def __call__(self, **kwargs):
        return ToolResult(
            ok=False,
            summary="Section BoundCurveTool failed: boom",
            data={"error_kind": "numerical"},
            warnings=[],
            blockers=["NumericalFailure: boom"],
        )


@pytest.fixture
def report_run(small_engine, tmp_path):
    run_dir = tmp_path / "bundle"
    agent = ReportAgent(small_engine, run_dir=run_dir)
    results = agent.run({"samples": 200})
    return agent, results, run_dir


@pytest.mark.integration
class TestReportAgent:
    """Test suite for ReportAgent."""

    def test_every_section_succeeds(self, report_run):
        agent, results, _ = report_run
        assert list(results) == SECTION_ORDER
        failed = {name: result.blockers for name, result in results.items() if not result.ok}
        assert failed == {}

    def test_bundle_contents(self, report_run):
        agent, _, run_dir = report_run
        assert validate_required_artifacts(run_dir) == []
        written = {path.stem for path in (run_dir / "outputs").glob("*.csv")}
        assert EXPECTED_OUTPUTS <= written

        manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["status"] == "ok"
        assert manifest["run_id"] == default_run_id(agent.engine)
        assert manifest["seed"] == 7
        assert manifest["config_hash"] == agent.engine.hash

    def test_outputs_carry_config_hash(self, report_run):
        agent, _, run_dir = report_run
        fields, frame = read_output(run_dir / "outputs" / "landscape.csv")
        assert fields == {"config_hash": agent.engine.hash, "seed": "7", "section": "landscape"}
        assert list(frame.columns) == ["theta", "exp", "nimp", "vimp"]
        assert len(frame) == 11

    def test_every_column_is_documented(self, report_run):
        _, results, run_dir = report_run
        for path in sorted((run_dir / "outputs").glob("*.csv")):
            _, frame = read_output(path)
            assert undocumented_columns(path.stem, frame) == [], path.name
        assert not any("csv_columns.yaml" in w for result in results.values() for w in result.warnings)

    def test_sample_override_reaches_qg_section(self, report_run):
        _, _, run_dir = report_run
        _, frame = read_output(run_dir / "outputs" / "qg_certificate.csv")
        assert int(frame["samples"].iloc[0]) == 200
        assert bool(frame["passed"].iloc[0])

    def test_sample_override_reaches_graph_fidelity_section(self, report_run):
        _, results, run_dir = report_run
        _, frame = read_output(run_dir / "outputs" / "sandwich.csv")
        assert int(frame["samples"].iloc[0]) == 200
        _, zero_set = read_output(run_dir / "outputs" / "zero_set.csv")
        assert int(zero_set["on_graph_samples"].iloc[0]) == 100
        assert results["GraphFidelityTool"].ok

    def test_events_log(self, report_run):
        agent, _, run_dir = report_run
        lines = (run_dir / "run_events.jsonl").read_text(encoding="utf-8").splitlines()
        events = [json.loads(line) for line in lines]
        assert len(events) == 2 * len(SECTION_ORDER)
        assert [e["event_type"] for e in events[:2]] == ["STEP_START", "STEP_END"]
        assert all(e["run_id"] == agent.run_id for e in events)
        assert events[1]["data"]["tables"] == {"landscape": 11}

    def test_rerun_is_byte_identical(self, small_engine, tmp_path, report_run):
        _, _, first_dir = report_run
        second_dir = tmp_path / "again"
        ReportAgent(small_engine, run_dir=second_dir).run({"samples": 200})
        for path in sorted((first_dir / "outputs").glob("*.csv")):
            assert path.read_bytes() == (second_dir / "outputs" / path.name).read_bytes(), path.name


class TestReportAgentPlan:
    """Planning and failure handling, without running the heavy sections."""

    def test_plan_order_and_args(self, small_engine):
        steps = ReportAgent(small_engine).plan({"samples": 500, "progress": True})
        assert [step["tool"] for step in steps] == SECTION_ORDER
        qg = next(step for step in steps if step["tool"] == "QGCertificateTool")
        assert qg["args"] == {"samples": 500, "progress": True}
        fidelity = next(step for step in steps if step["tool"] == "GraphFidelityTool")
        assert fidelity["args"] == {"samples": 500, "progress": True}

    def test_section_subset_keeps_report_order(self, small_engine):
        steps = ReportAgent(small_engine).plan({"sections": ["DtScalingTool", "BoundCurveTool"]})
        assert [step["tool"] for step in steps] == ["BoundCurveTool", "DtScalingTool"]

    def test_unknown_section(self, small_engine):
        with pytest.raises(ValueError, match="Unknown report sections"):
            ReportAgent(small_engine).plan({"sections": ["PlotTool"]})

    def test_failing_section_does_not_stop_the_run(self, small_engine, tmp_path):
        run_dir = tmp_path / "bundle"
        agent = ReportAgent(small_engine, run_dir=run_dir)
        agent.tools["BoundCurveTool"] = FailingTool()
        results = agent.run({"sections": ["BoundCurveTool", "EpsilonTradeoffTool", "DtScalingTool"]})

        assert list(results) == ["BoundCurveTool", "EpsilonTradeoffTool", "DtScalingTool"]
        assert not results["BoundCurveTool"].ok
        assert results["DtScalingTool"].ok

        manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["status"] == "failed"
        assert (run_dir / "outputs" / "dt_scaling.csv").exists()

        summary = (run_dir / "summary.md").read_text(encoding="utf-8")
        assert "BoundCurveTool [FAILED]" in summary
        assert "Blocker (BoundCurveTool): NumericalFailure: boom" in summary

    def test_without_run_dir_nothing_is_written(self, small_engine, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        agent = ReportAgent(small_engine)
        results = agent.run({"sections": ["DtScalingTool"]})
        assert results["DtScalingTool"].ok
        assert len(agent.events_log) == 2
        assert [path.name for path in tmp_path.iterdir()] == ["small.yaml"]

    def test_summarize_empty(self, small_engine):
        assert ReportAgent(small_engine).summarize({}) == "No results to summarize"
