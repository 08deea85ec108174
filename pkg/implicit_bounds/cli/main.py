"""CLI entrypoint: one subcommand per experiment, plus the full report."""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError

from ..agents.report_agent import ReportAgent, default_run_id
from ..core.audit.write_evidence import write_csv
from ..core.config.engine import ConfigEngine, ExperimentConfig
from ..core.errors import ConfigError
from ..core.experiments.report_tools import (
    BoundCurveTool,
    GraphFidelityTool,
    LandscapeTool,
    LipschitzTableTool,
    QGCertificateTool,
    TrainTool,
    error_kind,
)
from ..core.graph.distance import graph_distance
from ..core.losses.losses import LOSS_KINDS, Datapoint, explicit_batch, violation_batch
from ..core.tools import ToolResult

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_CERTIFICATE = 3
EXIT_NUMERICAL = 4

EXIT_CODES = {
    "config": EXIT_CONFIG,
    "certificate": EXIT_CERTIFICATE,
    "numerical": EXIT_NUMERICAL,
    "unexpected": EXIT_UNEXPECTED,
}

SUBCOMMANDS = ["lipschitz", "bounds", "landscape", "graph-distance", "qg-verify", "graph-fidelity", "train", "report"]


def load_env() -> None:
    """Load .env, then .env.local (overriding), from the repository root."""
    repo_root = Path(__file__).resolve().parents[2]
    env_file = repo_root / ".env"
    env_local = repo_root / ".env.local"
    if env_file.exists():
        load_dotenv(env_file, override=False)
    if env_local.exists():
        load_dotenv(env_local, override=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="implicit_bounds",
        description="Generalization bounds and graph-distance certificates for implicit contact losses",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="Experiment YAML (default: packaged configs/default.yaml)")
        p.add_argument("--eps", help="Violation weight: a positive number or 'auto'")
        p.add_argument("--seed", type=int, help="Override the config seed")
        p.add_argument("--out", help="Output directory (default: config, then $IMPLICIT_BOUNDS_OUTPUT_DIR, then ./runs)")
        return p

    p = add("lipschitz", "Lipschitz constants, loss constants and their sampled validation")
    p.add_argument("--samples", type=int, default=10_000, help="Validation samples")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")

    add("bounds", "Generalization bound curves against n and delta, and the sample-size ratio")

    p = add("landscape", "Mean loss over the theta grid")
    p.add_argument("--kind", choices=LOSS_KINDS, help="Single loss (default: all three)")

    p = add("graph-distance", "Distance from one datapoint to the graph of the dynamics")
    p.add_argument("--z", type=float, required=True, help="Height (m)")
    p.add_argument("--v", type=float, required=True, help="Velocity (m/s)")
    p.add_argument("--y", type=float, required=True, help="Observed next velocity (m/s)")

    p = add("qg-verify", "Sampled quadratic-growth certificate of the violation loss")
    p.add_argument("--samples", type=int, help="Samples (default: graph.samples from the config)")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")

    p = add("graph-fidelity", "Sandwich and zero-set certificates, and graph distance against prediction error")
    p.add_argument("--samples", type=int, help="Samples (default: graph.samples from the config)")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")

    p = add("train", "Subgradient training of theta")
    p.add_argument("--kind", choices=LOSS_KINDS, help="Single loss (default: all three)")

    p = add("report", "Every report section, written as a run bundle")
    p.add_argument("--samples", type=int, help="Samples of the graph-oracle sections")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    return parser


def load_engine(args: argparse.Namespace) -> ConfigEngine:
    """Config file plus command-line overrides, revalidated so the hash covers them.

    Raises:
        FileNotFoundError: --config names a missing file
        ConfigError: invalid file content or override
    """
    engine = ConfigEngine(args.config)
    if args.eps is None and args.seed is None:
        return engine

    raw = engine.config.model_dump(mode="json")
    if args.eps is not None:
        if args.eps == "auto":
            raw["epsilon"] = "auto"
        else:
            try:
                raw["epsilon"] = float(args.eps)
            except ValueError as exc:
                raise ConfigError(f"--eps must be a number or 'auto', got {args.eps!r}") from exc
    if args.seed is not None:
        raw["seed"] = args.seed
    try:
        return ConfigEngine(config=ExperimentConfig.model_validate(raw))
    except ValidationError as exc:
        raise ConfigError(f"Invalid command-line override: {exc}") from exc


def report_error(message: str, kind: str) -> int:
    """Print the error as one JSON object on stderr and return its exit code."""
    code = EXIT_CODES[kind]
    print(json.dumps({"error": message, "kind": kind, "exit_code": code}), file=sys.stderr)
    return code


def emit_tables(result: ToolResult, engine: ConfigEngine, out_dir: Path) -> None:
    for name, frame in result.data.get("tables", {}).items():
        path = write_csv(frame, out_dir / f"{name}.csv", engine.hash, engine.seed, name)
        print(f"\n[{name}] -> {path}")
        print(frame.to_string(index=False))


def finish(result: ToolResult, engine: ConfigEngine, out_dir: Path) -> int:
    print(result.summary)
    for warning in result.warnings:
        print(f"Warning: {warning}")
    emit_tables(result, engine, out_dir)
    if result.ok:
        return EXIT_OK
    return report_error("; ".join(result.blockers) or result.summary, result.data.get("error_kind") or "unexpected")


def run_graph_distance(args: argparse.Namespace, engine: ConfigEngine, out_dir: Path) -> int:
    params = engine.get_model_params()
    bounds = engine.get_domain_bounds()
    d = Datapoint.of(args.z, args.v, args.y)
    result = graph_distance(params, d, bounds, engine.get_graph_grid())
    frame = pd.DataFrame(
        [
            {
                "z": args.z,
                "v": args.v,
                "y": args.y,
                "distance": result.distance,
                "nearest_z": result.nearest.x.z,
                "nearest_v": result.nearest.x.v,
                "nearest_y": result.nearest.y.v_next,
                "resolution": result.resolution,
                "inconclusive": result.inconclusive,
                "l_exp": float(explicit_batch(params, args.z, args.v, args.y).value),
                "l_vimp": float(violation_batch(params, args.z, args.v, args.y, engine.get_epsilon().value, bounds.b_lambda).value),
            }
        ]
    )
    tool_result = ToolResult(
        ok=not result.inconclusive,
        summary=f"Graph distance {result.distance:.17g} (resolution {result.resolution:.3g})",
        data={"tables": {"graph_distance": frame}, "error_kind": "numerical"},
        blockers=["nearest graph point lies on the search-box boundary"] if result.inconclusive else [],
    )
    return finish(tool_result, engine, out_dir)


def run_report(args: argparse.Namespace, engine: ConfigEngine, out_dir: Path) -> int:
    agent = ReportAgent(engine, run_dir=out_dir / default_run_id(engine))
    results = agent.run({"samples": args.samples, "progress": args.progress})
    print(agent.summarize(results))
    print(f"\nRun bundle at: {agent.run_dir}")

    failed = [result for result in results.values() if not result.ok]
    if not failed:
        return EXIT_OK
    first = failed[0]
    return report_error(
        f"{len(failed)} report sections failed; first: {first.summary}",
        first.data.get("error_kind") or "unexpected",
    )


def dispatch(args: argparse.Namespace) -> int:
    engine = load_engine(args)
    out_dir = engine.get_output_dir(args.out)

    if args.command == "report":
        return run_report(args, engine, out_dir)
    if args.command == "graph-distance":
        return run_graph_distance(args, engine, out_dir)

    kinds = [args.kind] if getattr(args, "kind", None) else list(LOSS_KINDS)
    if args.command == "lipschitz":
        result = LipschitzTableTool(engine)(samples=args.samples, progress=args.progress)
    elif args.command == "bounds":
        result = BoundCurveTool(engine)()
    elif args.command == "landscape":
        result = LandscapeTool(engine)(kinds=kinds)
    elif args.command == "qg-verify":
        result = QGCertificateTool(engine)(samples=args.samples, progress=args.progress)
    elif args.command == "graph-fidelity":
        result = GraphFidelityTool(engine)(samples=args.samples, progress=args.progress)
    else:
        result = TrainTool(engine)(kinds=kinds)
    return finish(result, engine, out_dir)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand, return the exit code.

    Exit codes: 0 success, 2 config error, 3 failed certificate,
    4 numerical failure, 1 anything else. Errors are also printed to stderr
    as one JSON object.
    """
    load_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config-error code
        return int(exc.code or 0)

    try:
        return dispatch(args)
    except Exception as exc:  # noqa: BLE001 - mapped to an exit code
        return report_error(str(exc), error_kind(exc))


if __name__ == "__main__":
    sys.exit(main())
