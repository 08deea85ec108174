"""Shared BaseAgent contract for run pipelines."""

import json
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..core.tools import ToolResult

SANITIZED_KEYS = (
    "row_count",
    "record_count",
    "error_count",
    "error_kind",
    "ratio",
    "contact_fraction",
    "config_hash",
)


class BaseAgent(ABC):
    """Defines the orchestration contract for pipelines built from Tools.

    Agents plan, call tools in order and record what happened; they never do
    numerical work themselves. execute() is a template method: subclasses
    customize it through the hook methods below rather than overriding it.
    """

    halt_on_blockers = True
    """Stop at the first failing step. ReportAgent turns this off."""

    def __init__(self, run_id: Optional[str] = None, events_dir: Optional[Path] = None):
        """Initialize BaseAgent with run-event logging.

        Args:
            run_id: Run identifier stamped on every event
            events_dir: Directory receiving run_events.jsonl (None keeps events in memory only)
        """
        self.run_id = run_id
        self.events_dir = events_dir
        self.events_log: List[Dict[str, Any]] = []
        self.tools: Dict[str, Any] = {}

    @abstractmethod
    def plan(self, inputs: Dict[str, Any]) -> List[Dict[str, Any]]:
        """Return structured execution steps for the provided inputs.

        Each step is a dict with 'tool' (registered tool name) and 'args'
        (keyword arguments). write_evidence renders plan.md from these steps.
        """

    def _emit(self, event_type: str, message: str, data: Dict[str, Any]) -> None:
        """Append one event to run_events.jsonl.

        Args:
            event_type: STEP_START or STEP_END
            message: Human-readable message
            data: Sanitized metadata only (counts, flags, hashes), never arrays or DataFrames
        """
        event = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "event_type": event_type,
            "run_id": self.run_id,
            "message": message,
            "data": data,
        }
        self.events_log.append(event)

        # append mode: reruns into the same directory keep the earlier history
        if self.events_dir:
            self.events_dir.mkdir(parents=True, exist_ok=True)
            with open(self.events_dir / "run_events.jsonl", "a", encoding="utf-8") as f:
                f.write(json.dumps(event) + "\n")

    def _sanitize_tool_result(self, result: ToolResult) -> Dict[str, Any]:
        """Metadata of a ToolResult that is safe to log."""
        sanitized = {
            "ok": result.ok,
            "summary": result.summary,
            "warning_count": len(result.warnings),
            "blockers": list(result.blockers),
        }
        for key in SANITIZED_KEYS:
            if key in result.data:
                sanitized[key] = result.data[key]
        tables = result.data.get("tables")
        if tables:
            sanitized["tables"] = {name: len(frame) for name, frame in tables.items()}
        return sanitized

    def _invoke_tool(self, tool_name: str, tool: Any, tool_args: Dict[str, Any],
                     context: Dict[str, Any]) -> ToolResult:
        return tool(**tool_args)

    def _prepare_tool_args(self, step: Dict[str, Any], context: Dict[str, Any]) -> Dict[str, Any]:
        return step["args"].copy()

    def _handle_tool_result(self, step: Dict[str, Any], result: ToolResult,
                            context: Dict[str, Any]) -> None:
        """Hook for subclasses that chain results between steps."""

    def execute(self, inputs: Dict[str, Any]) -> Dict[str, ToolResult]:
        """Run the plan step by step with STEP_START/STEP_END events.

        Args:
            inputs: Input dictionary passed to plan()

        Returns:
            Tool name -> ToolResult, in execution order

        Raises:
            ValueError: a step names a tool that is not registered
        """
        results: Dict[str, ToolResult] = {}
        context: Dict[str, Any] = {}

        for step in self.plan(inputs):
            tool_name = step["tool"]
            self._emit("STEP_START", f"Executing {tool_name}", {"tool": tool_name, "args": step["args"]})

            if tool_name not in self.tools:
                raise ValueError(f"Tool '{tool_name}' not found in tools registry")
            tool_args = self._prepare_tool_args(step, context)
            result = self._invoke_tool(tool_name, self.tools[tool_name], tool_args, context)
            self._handle_tool_result(step, result, context)

            self._emit("STEP_END", f"Completed {tool_name}", {"tool": tool_name, **self._sanitize_tool_result(result)})
            results[tool_name] = result

            if self.halt_on_blockers and (not result.ok or result.blockers):
                break

        return results

    @abstractmethod
    def summarize(self, run_results: Dict[str, Any]) -> str:
        """Produce a human-readable summary of decisions and outcomes."""
