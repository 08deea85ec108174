"""ReportAgent: runs every report section and collects the tables.

Deterministic agent with hardcoded orchestration. Sections run in a fixed
order; a failing section is recorded and the remaining sections still run.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

from .base_agent import BaseAgent
from ..core.audit.evidence import undocumented_columns
from ..core.audit.write_evidence import write_evidence_bundle
from ..core.config.engine import ConfigEngine
from ..core.experiments.report_tools import REPORT_TOOLS, build_tools
from ..core.tools import ToolResult

SECTION_ORDER = [tool.name for tool in REPORT_TOOLS]
SAMPLED_SECTIONS = ("QGCertificateTool", "GraphFidelityTool")


def default_run_id(engine: ConfigEngine) -> str:
    return f"report-{engine.hash}-seed{engine.seed}"


class ReportAgent(BaseAgent):
    """Builds the full report bundle from one experiment config."""

    halt_on_blockers = False

    def __init__(self, engine: ConfigEngine, run_id: Optional[str] = None, run_dir: Optional[Path] = None):
        """Initialize ReportAgent.

        Args:
            engine: loaded experiment configuration
            run_id: Run identifier (defaults to report-<config hash>-seed<seed>)
            run_dir: Bundle directory, also receiving run_events.jsonl
        """
        super().__init__(run_id=run_id or default_run_id(engine), events_dir=run_dir)
        self.engine = engine
        self.run_dir = run_dir
        self.tools = build_tools(engine)

    def plan(self, inputs: Dict[str, Any]) -> List[Dict[str, Any]]:
        """Return one step per requested section, in report order.

        Args:
            inputs: optional 'sections' (tool names to run, default all),
                'samples' (sample count override of the graph-oracle sections) and
                'progress' (tqdm on their sweeps)

        Raises:
            ValueError: an unknown section name
        """
        sections = inputs.get("sections") or SECTION_ORDER
        unknown = [name for name in sections if name not in self.tools]
        if unknown:
            raise ValueError(f"Unknown report sections: {unknown}; known: {SECTION_ORDER}")

        steps = []
        for name in SECTION_ORDER:
            if name not in sections:
                continue
            args: Dict[str, Any] = {}
            if name in SAMPLED_SECTIONS:
                if inputs.get("samples"):
                    args["samples"] = int(inputs["samples"])
                args["progress"] = bool(inputs.get("progress", False))
            steps.append({"tool": name, "args": args})
        return steps

    def _handle_tool_result(self, step: Dict[str, Any], result: ToolResult, context: Dict[str, Any]) -> None:
        for name, frame in result.data.get("tables", {}).items():
            missing = undocumented_columns(name, frame)
            if missing:
                result.warnings.append(f"{name}.csv has columns missing from csv_columns.yaml: {missing}")

    def summarize(self, run_results: Dict[str, ToolResult]) -> str:
        """One line per section, then blockers and warnings."""
        if not run_results:
            return "No results to summarize"

        summary_parts = [f"Config hash {self.engine.hash}, seed {self.engine.seed}", ""]
        for name, result in run_results.items():
            status = "ok" if result.ok else "FAILED"
            summary_parts.append(f"- {name} [{status}]: {result.summary}")
        for name, result in run_results.items():
            for blocker in result.blockers:
                summary_parts.append(f"Blocker ({name}): {blocker}")
            for warning in result.warnings:
                summary_parts.append(f"Warning ({name}): {warning}")
        return "\n".join(summary_parts)

    def run(self, inputs: Optional[Dict[str, Any]] = None) -> Dict[str, ToolResult]:
        """execute() followed by the bundle write when run_dir is set."""
        inputs = inputs or {}
        results = self.execute(inputs)
        if self.run_dir is not None:
            write_evidence_bundle(
                run_id=self.run_id,
                agent_name=type(self).__name__,
                plan_steps=self.plan(inputs),
                summary=self.summarize(results),
                run_results=results,
                run_dir=self.run_dir,
                config_hash=self.engine.hash,
                seed=self.engine.seed,
            )
        return results
