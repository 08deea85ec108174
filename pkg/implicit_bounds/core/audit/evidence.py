"""Validation helpers for run bundles written by ReportAgent."""

from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import pandas as pd
import yaml

REQUIRED_ARTIFACTS = ("manifest.json", "plan.md", "summary.md", "run_events.jsonl")
COLUMN_SCHEMA = Path(__file__).resolve().parents[2] / "schemas" / "csv_columns.yaml"


def validate_required_artifacts(run_path: Path, required_files: Iterable[str] = REQUIRED_ARTIFACTS) -> list[str]:
    """Validate that all required artifacts are present for a run.

    Args:
        run_path: Base directory of the run bundle.
        required_files: Relative file names expected inside ``run_path``.

    Returns:
        A list of missing artifact paths relative to ``run_path``.
    """

    missing: list[str] = []
    for artifact in required_files:
        if not (run_path / artifact).exists():
            missing.append(artifact)
    return missing


def read_output(path: Path) -> Tuple[Dict[str, str], pd.DataFrame]:
    """Read a bundle CSV back: (comment fields, table).

    Raises:
        ValueError: the first line is not a ``# key=value ...`` comment
    """
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().strip()
        if not first.startswith("#"):
            raise ValueError(f"{path} does not start with a comment line")
        fields = dict(item.split("=", 1) for item in first[1:].split())
        frame = pd.read_csv(f)
    return fields, frame


@lru_cache(maxsize=None)
def load_column_schema(path: Path = COLUMN_SCHEMA) -> Dict[str, Dict[str, str]]:
    """Table name -> {column: description} from schemas/csv_columns.yaml."""
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)["tables"]


def undocumented_columns(
    table: str, frame: pd.DataFrame, schema: Optional[Mapping[str, Mapping[str, str]]] = None
) -> List[str]:
    """Columns of ``frame`` that the schema does not document for ``table``.

    An unknown table reports every column.
    """
    schema = load_column_schema() if schema is None else schema
    documented = schema.get(table, {})
    return [str(column) for column in frame.columns if column not in documented]
