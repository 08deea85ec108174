"""Report sections as Tools.

Each tool reads its settings from a ConfigEngine, computes one section of the
report and returns a ToolResult whose data["tables"] maps CSV names to
DataFrames. Tools never raise: failures become blockers, with
data["error_kind"] telling the CLI which exit code applies.
"""

from typing import Any, Dict, Optional

import pandas as pd

from ..bounds.generalization import approach_inputs, bound_curve, dt_scaling, generalization_bound
from ..bounds.lipschitz import loss_constants, sensitivity_by_region
from ..bounds.validation import empirical_suprema, lipschitz_validate
from ..config.engine import ConfigEngine
from ..errors import CertificateFailure, ConfigError, NumericalFailure, UnachievableTargetError
from ..graph.certificates import epsilon_tradeoff, graph_vs_prediction, qg_verify, sandwich_sweep, zero_set_check
from ..losses.landscape import loss_landscape
from ..losses.losses import LOSS_EXPLICIT, LOSS_KINDS, LOSS_VIOLATION
from ..tools import ToolResult
from .dataset import generate_dataset, sample_datapoints, spawn_rngs
from .gap import generalization_gap
from .sample_complexity import sample_complexity_ratio
from .trainer import train

STIFF_RATIO = 0.01


def error_kind(exc: BaseException) -> str:
    if isinstance(exc, (ConfigError, FileNotFoundError)):
        return "config"
    if isinstance(exc, CertificateFailure):
        return "certificate"
    if isinstance(exc, (NumericalFailure, UnachievableTargetError)):
        return "numerical"
    return "unexpected"


def failure(section: str, exc: BaseException) -> ToolResult:
    return ToolResult(
        ok=False,
        summary=f"Section {section} failed: {exc}",
        data={"error_kind": error_kind(exc)},
        warnings=[],
        blockers=[f"{type(exc).__name__}: {exc}"],
    )


class _SectionTool:
    name = "SectionTool"

    def __init__(self, engine: ConfigEngine):
        self.engine = engine

    def __call__(self, **kwargs: Any) -> ToolResult:
        try:
            return self.run(**kwargs)
        except Exception as exc:  # noqa: BLE001 - reported as a blocker
            return failure(self.name, exc)

    def run(self, **kwargs: Any) -> ToolResult:
        raise NotImplementedError


class LipschitzTableTool(_SectionTool):
    """Lipschitz constants and loss constants, checked against sampled slopes and suprema."""

    name = "LipschitzTableTool"

    def run(self, samples: int = 10_000, progress: bool = False) -> ToolResult:
        params = self.engine.get_model_params()
        bounds = self.engine.get_domain_bounds()
        eps = self.engine.get_epsilon()
        table, suprema, loss_lip = loss_constants(params, bounds, eps)

        loss_rows = pd.DataFrame(
            [
                {
                    "approach": kind,
                    "L_theta": loss_lip.for_kind(kind),
                    "L_theta_general": getattr(loss_lip, f"general_{kind}_theta"),
                    "B_loss": getattr(suprema, f"B_{kind}"),
                }
                for kind in LOSS_KINDS
            ]
        )
        validation = lipschitz_validate(params, bounds, eps, samples=samples, seed=self.engine.seed, progress=progress)
        sup = empirical_suprema(params, bounds, eps, samples=samples, seed=self.engine.seed)

        tables = {
            "lipschitz_table": table.to_frame(),
            "loss_lipschitz": loss_rows,
            "lipschitz_validation": validation.summary,
            "empirical_suprema": sup,
            "lambda_sensitivity": sensitivity_by_region(params, eps),
        }
        if len(validation.violations):
            tables["lipschitz_violations"] = validation.violations

        warnings = []
        if bounds.phi_max > bounds.lambda_max:
            warnings.append("phi_max > lambda_max: general and toy vimp constants differ")
        blockers = []
        if not validation.passed:
            blockers.append(f"{len(validation.violations)} sampled slopes exceed the closed-form constants")
        if not sup["dominates"].all():
            blockers.append("sampled loss values exceed the analytic suprema")
        return ToolResult(
            ok=not blockers,
            summary=f"Lipschitz table at eps={eps.value:g}, lambda_max={bounds.lambda_max:.6g}, {samples} validation samples",
            data={
                "tables": tables,
                "table": table,
                "row_count": len(loss_rows),
                "error_count": len(validation.violations),
                "error_kind": "certificate" if blockers else None,
            },
            warnings=warnings,
            blockers=blockers,
        )


class LandscapeTool(_SectionTool):
    """Mean loss of all three approaches over the theta grid on the configured dataset."""

    name = "LandscapeTool"

    def run(self, kinds=LOSS_KINDS) -> ToolResult:
        params = self.engine.get_model_params()
        bounds = self.engine.get_domain_bounds()
        eps = self.engine.get_epsilon()
        cfg = self.engine.config.dataset
        data = generate_dataset(params, bounds, cfg.n, self.engine.get_noise(), cfg.contact_bias)
        thetas = self.engine.get_theta_grid()

        frame = pd.DataFrame({"theta": thetas})
        for kind in kinds:
            frame[kind] = loss_landscape(params, thetas, data.points, kind, eps, bounds.b_lambda)["mean_loss"].to_numpy()

        argmins = {kind: float(frame["theta"].iloc[frame[kind].idxmin()]) for kind in kinds}
        return ToolResult(
            ok=True,
            summary=f"Landscape over {len(thetas)} theta values, {cfg.n} points; argmins {argmins}",
            data={
                "tables": {"landscape": frame},
                "row_count": len(frame),
                "contact_fraction": data.contact_fraction,
            },
        )


class BoundCurveTool(_SectionTool):
    """Generalization bound against n and delta, and the sample-size ratio."""

    name = "BoundCurveTool"

    def run(self) -> ToolResult:
        params = self.engine.get_model_params()
        bounds = self.engine.get_domain_bounds()
        eps = self.engine.get_epsilon()
        sweeps = self.engine.config.sweeps
        inputs = approach_inputs(params, bounds, eps, n=sweeps.n_reference, delta=sweeps.delta, k=sweeps.k)

        by_n = bound_curve(sweeps.n_values, inputs, over="n")
        by_delta = bound_curve(sweeps.delta_values, inputs, over="delta")

        target = generalization_bound(inputs[LOSS_VIOLATION])
        complexity = sample_complexity_ratio(target, inputs[LOSS_EXPLICIT], inputs[LOSS_VIOLATION])
        ratio_frame = pd.DataFrame(
            [
                {
                    "target_bound": target,
                    "n_reference": sweeps.n_reference,
                    "n_pred": complexity.n_pred,
                    "n_vimp": complexity.n_vimp,
                    "ratio": complexity.ratio,
                }
            ]
        )
        return ToolResult(
            ok=True,
            summary=f"Bound curves; prediction approaches need {complexity.ratio:.4g}x the data",
            data={
                "tables": {"bounds_vs_n": by_n, "bounds_vs_delta": by_delta, "sample_complexity": ratio_frame},
                "row_count": len(by_n) + len(by_delta),
                "ratio": complexity.ratio,
            },
        )


class QGCertificateTool(_SectionTool):
    """Sampled quadratic-growth certificate at the configured eps."""

    name = "QGCertificateTool"

    def run(self, samples: Optional[int] = None, progress: bool = False) -> ToolResult:
        graph = self.engine.config.graph
        certificate = qg_verify(
            self.engine.get_model_params(),
            self.engine.get_domain_bounds(),
            self.engine.get_epsilon(),
            samples=samples or graph.samples,
            seed=self.engine.seed,
            grid=self.engine.get_graph_grid(),
            mode=graph.sample_mode,
            progress=progress,
        )
        tables = {"qg_certificate": certificate.to_frame()}
        if certificate.violations:
            tables["qg_violations"] = pd.DataFrame(certificate.violations)
        warnings = []
        if certificate.inconclusive:
            warnings.append(f"{certificate.inconclusive} oracle queries ended on the search-box boundary")
        blockers = []
        if not certificate.passed:
            blockers.append(f"{len(certificate.violations)} samples violate quadratic growth (mu={certificate.mu:g})")
        return ToolResult(
            ok=certificate.passed,
            summary=(
                f"QG certificate mu={certificate.mu:g} over {certificate.samples} samples: "
                f"worst ratio {certificate.worst_ratio:.6g}, {len(certificate.violations)} violations"
            ),
            data={
                "tables": tables,
                "certificate": certificate,
                "error_count": len(certificate.violations),
                "error_kind": None if certificate.passed else "certificate",
            },
            warnings=warnings,
            blockers=blockers,
        )


class GraphFidelityTool(_SectionTool):
    """Sandwich and zero-set certificates, and graph distance next to prediction error near the graph."""

    name = "GraphFidelityTool"

    def run(self, samples: Optional[int] = None, progress: bool = False) -> ToolResult:
        params = self.engine.get_model_params()
        bounds = self.engine.get_domain_bounds()
        eps = self.engine.get_epsilon()
        grid = self.engine.get_graph_grid()
        graph = self.engine.config.graph
        samples = samples or graph.samples

        failures = sandwich_sweep(
            params, bounds, samples=samples, seed=self.engine.seed, grid=grid, mode=graph.sample_mode, progress=progress
        )
        zero_set = zero_set_check(params, bounds, eps, samples=samples, seed=self.engine.seed, grid=grid)

        (rng,) = spawn_rngs(self.engine.seed, 1)
        z, v, y = sample_datapoints(params, bounds, self.engine.config.dataset.n, rng, "near_graph")
        per_point = graph_vs_prediction(params, z, v, y, bounds, grid)

        tables = {
            "sandwich": pd.DataFrame([{"samples": samples, "failures": len(failures), "passed": failures.empty}]),
            "zero_set": zero_set.to_frame(),
            "graph_vs_prediction": per_point,
        }
        if not failures.empty:
            tables["sandwich_failures"] = failures
        if zero_set.violations:
            tables["zero_set_violations"] = pd.DataFrame(zero_set.violations)

        blockers = []
        if not failures.empty:
            blockers.append(f"{len(failures)} samples violate the sandwich inequality")
        if not zero_set.passed:
            blockers.append(f"{len(zero_set.violations)} samples violate the zero set of the violation loss")
        stiff = int((per_point["ratio"] < STIFF_RATIO).sum())
        return ToolResult(
            ok=not blockers,
            summary=(
                f"Graph fidelity over {samples} samples; on-graph max loss {zero_set.on_graph_max_loss:.3g}, "
                f"{stiff}/{len(per_point)} near-graph points with d^2 < {STIFF_RATIO:g} * l_exp"
            ),
            data={
                "tables": tables,
                "row_count": len(per_point),
                "error_count": len(failures) + len(zero_set.violations),
                "error_kind": "certificate" if blockers else None,
            },
            blockers=blockers,
        )


class TrainTool(_SectionTool):
    """Trains theta under each loss on the configured dataset."""

    name = "TrainTool"

    def run(self, kinds=LOSS_KINDS) -> ToolResult:
        params = self.engine.get_model_params()
        bounds = self.engine.get_domain_bounds()
        eps = self.engine.get_epsilon()
        cfg = self.engine.config.dataset
        data = generate_dataset(params, bounds, cfg.n, self.engine.get_noise(), cfg.contact_bias)
        trainer = self.engine.get_trainer_config()

        rows = []
        curves = []
        warnings = []
        for kind in kinds:
            result = train(params, data, kind, eps, trainer, bounds)
            rows.append(
                {
                    "kind": kind,
                    "theta_true": data.theta_true,
                    "theta0": result.theta_curve[0],
                    "theta_hat": result.theta_hat,
                    "abs_error": abs(result.theta_hat - data.theta_true),
                    "iterations": result.iterations,
                    "converged": result.converged,
                    "diverged": result.diverged,
                    "final_loss": result.loss_curve[-1],
                }
            )
            curves.append(
                pd.DataFrame(
                    {
                        "kind": kind,
                        "iteration": range(len(result.loss_curve)),
                        "theta": result.theta_curve,
                        "loss": result.loss_curve,
                    }
                )
            )
            if result.diverged:
                warnings.append(f"{kind} training diverged after {result.iterations} iterations")

        return ToolResult(
            ok=True,
            summary=f"Trained {len(rows)} models on {cfg.n} points",
            data={
                "tables": {"training": pd.DataFrame(rows), "training_curves": pd.concat(curves, ignore_index=True)},
                "record_count": len(rows),
            },
            warnings=warnings,
        )


class GeneralizationGapTool(_SectionTool):
    """Train-vs-held-out gap of violation-trained models next to the bound."""

    name = "GeneralizationGapTool"

    def run(self) -> ToolResult:
        sweeps = self.engine.config.sweeps
        dataset = self.engine.config.dataset
        frame = generalization_gap(
            self.engine.get_model_params(),
            self.engine.get_domain_bounds(),
            self.engine.get_epsilon(),
            seeds=[self.engine.seed + i for i in range(sweeps.gap_seeds)],
            n_values=sweeps.gap_n_values,
            noise=self.engine.get_gap_noise(),
            contact_bias=dataset.contact_bias,
            trainer=self.engine.get_trainer_config(),
            holdout=dataset.holdout,
            delta=sweeps.delta,
        )
        outside = int((~frame["within_bound"]).sum())
        blockers = [f"{outside} trained models exceed the generalization bound"] if outside else []
        return ToolResult(
            ok=not outside,
            summary=f"Generalization gap over {len(frame)} trained models, max gap {frame['gap'].max():.6g}",
            data={
                "tables": {"generalization_gap": frame},
                "row_count": len(frame),
                "error_kind": "certificate" if outside else None,
            },
            blockers=blockers,
        )


class EpsilonTradeoffTool(_SectionTool):
    name = "EpsilonTradeoffTool"

    def run(self) -> ToolResult:
        sweeps = self.engine.config.sweeps
        frame = epsilon_tradeoff(
            self.engine.get_model_params(),
            self.engine.get_domain_bounds(),
            sweeps.eps_values,
            n_ref=sweeps.n_reference,
            delta=sweeps.delta,
        )
        return ToolResult(
            ok=True,
            summary=f"eps trade-off over {len(frame)} values",
            data={"tables": {"epsilon_tradeoff": frame}, "row_count": len(frame)},
        )


class DtScalingTool(_SectionTool):
    name = "DtScalingTool"

    def run(self) -> ToolResult:
        frame = dt_scaling(
            self.engine.get_model_params(),
            self.engine.get_domain_bounds(),
            self.engine.get_epsilon(),
            self.engine.config.sweeps.dt_values,
        )
        return ToolResult(
            ok=True,
            summary=f"Time-step scaling over {len(frame)} values of dt",
            data={"tables": {"dt_scaling": frame}, "row_count": len(frame)},
        )


REPORT_TOOLS = (
    LandscapeTool,
    BoundCurveTool,
    LipschitzTableTool,
    QGCertificateTool,
    GraphFidelityTool,
    TrainTool,
    GeneralizationGapTool,
    EpsilonTradeoffTool,
    DtScalingTool,
)


def build_tools(engine: ConfigEngine) -> Dict[str, _SectionTool]:
    return {tool.name: tool(engine) for tool in REPORT_TOOLS}
