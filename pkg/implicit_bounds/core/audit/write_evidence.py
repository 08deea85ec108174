"""Run bundle writer.

Writes manifest.json, plan.md, summary.md and the outputs/ CSV tables.
Does NOT write run_events.jsonl; BaseAgent.execute() appends those events
while tools run.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from ..tools import ToolResult

FLOAT_FORMAT = "%.17g"


def csv_comment(config_hash: str, seed: int, section: str) -> str:
    return f"# config_hash={config_hash} seed={seed} section={section}\n"


def write_csv(frame: pd.DataFrame, path: Path, config_hash: str, seed: int, section: str) -> Path:
    """Write one table: comment line, header row, values at 17 significant digits.

    Args:
        frame: table to write (index is dropped)
        path: destination file; parent directories are created
        config_hash: hash of the config that produced the table
        seed: master seed of the run
        section: table name recorded in the comment line

    Returns:
        The path written
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(csv_comment(config_hash, seed, section))
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def section_status(run_results: Dict[str, ToolResult]) -> Dict[str, Dict[str, Any]]:
    status = {}
    for name, result in run_results.items():
        status[name] = {
            "ok": result.ok,
            "summary": result.summary,
            "warnings": list(result.warnings),
            "blockers": list(result.blockers),
            "outputs": sorted(result.data.get("tables", {}).keys()),
        }
    return status


def write_manifest(
    run_id: str,
    agent_name: str,
    run_dir: Path,
    config_hash: str,
    seed: int,
    run_results: Optional[Dict[str, ToolResult]] = None,
) -> None:
    """Write manifest.json.

    Args:
        run_id: Run identifier
        agent_name: Name of the agent that executed
        run_dir: Directory where the bundle is written
        config_hash: config_hash() of the run's config
        seed: master seed
        run_results: Tool name -> ToolResult from agent.execute()
    """
    sections = section_status(run_results or {})
    manifest = {
        "run_id": run_id,
        "agent": agent_name,
        "config_hash": config_hash,
        "seed": seed,
        "status": "ok" if all(s["ok"] for s in sections.values()) else "failed",
        "sections": sections,
    }
    with open(run_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)


def write_plan(plan_steps: List[Dict[str, Any]], run_dir: Path) -> None:
    """Write human-readable plan.md from the structured steps of agent.plan()."""
    plan_lines = ["# Execution Plan\n"]
    for i, step in enumerate(plan_steps, 1):
        plan_lines.append(f"{i}. {step.get('tool', 'Unknown')}")
        args = step.get("args", {})
        if args:
            plan_lines.append(f"   Arguments: {json.dumps(args, indent=2)}")
        plan_lines.append("")
    with open(run_dir / "plan.md", "w", encoding="utf-8") as f:
        f.write("\n".join(plan_lines))


def write_summary(summary: str, run_dir: Path) -> None:
    with open(run_dir / "summary.md", "w", encoding="utf-8") as f:
        f.write(f"# Execution Summary\n\n{summary}\n")


def serialize_outputs(run_results: Dict[str, ToolResult], run_dir: Path, config_hash: str, seed: int) -> List[Path]:
    """Write every table in data["tables"] of every result to outputs/<name>.csv.

    Failed sections still write whatever tables they produced, so a failing
    certificate leaves its violations on disk.

    Returns:
        Paths written, in section order
    """
    outputs_dir = run_dir / "outputs"
    outputs_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for result in run_results.values():
        for name, frame in result.data.get("tables", {}).items():
            written.append(write_csv(frame, outputs_dir / f"{name}.csv", config_hash, seed, name))
    return written


def write_evidence_bundle(
    run_id: str,
    agent_name: str,
    plan_steps: List[Dict[str, Any]],
    summary: str,
    run_results: Dict[str, ToolResult],
    run_dir: Path,
    config_hash: str,
    seed: int,
) -> List[Path]:
    """Write the complete bundle: manifest.json, plan.md, summary.md, outputs/*.csv.

    Returns:
        CSV paths written
    """
    run_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(run_id, agent_name, run_dir, config_hash, seed, run_results)
    write_plan(plan_steps, run_dir)
    write_summary(summary, run_dir)
    return serialize_outputs(run_results, run_dir, config_hash, seed)
