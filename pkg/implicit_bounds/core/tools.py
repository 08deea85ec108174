"""Tool protocol and ToolResult dataclass shared by every report section."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Protocol


class Tool(Protocol):
    """Protocol defining the interface for all report tools.

    Tools are deterministic, parameterized components that compute one section
    of a run (a table, a certificate, a training run). They do not contain
    orchestration logic; ReportAgent decides order and bookkeeping.
    """

    name: str

    def __call__(self, **kwargs: Any) -> "ToolResult":
        """Execute the tool with provided arguments and return a ToolResult."""
        ...


@dataclass
class ToolResult:
    """Standardized result structure for all tool executions.

    ToolResult.data can contain in-memory objects (DataFrames, certificates) for
    chaining into the run bundle writer. Only sanitized metadata (counts, pass
    flags, hashes) is logged to run_events.jsonl.

    Tools that produce CSV output put data["tables"] = {name: DataFrame};
    write_evidence.serialize_outputs() writes each one to outputs/<name>.csv.
    """

    ok: bool
    """Success/failure indicator."""

    summary: str
    """Human-readable summary of the tool execution."""

    data: Dict[str, Any]
    """Structured data - may contain in-memory objects (DataFrames, dataclasses)."""

    warnings: List[str] = field(default_factory=list)
    """Non-blocking issues that don't prevent execution."""

    blockers: List[str] = field(default_factory=list)
    """Blocking errors; the section failed."""
