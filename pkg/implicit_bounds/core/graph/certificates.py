"""Certificates relating the losses to graph distance.

* sandwich: l_exp >= d^2 >= l_exp / (1 + L_f_x^2)
* zero set: the violation loss vanishes exactly on the graph
* quadratic growth: l_vimp >= (mu / 2) d^2 with mu = qg_modulus(eps)

All sweeps draw seeded samples from the domain box, evaluate the graph-distance
oracle in batch and allow the oracle slack 2 d r + r^2 on squared distances.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..bounds.generalization import approach_inputs, generalization_bound
from ..dynamics.contact_model import DomainBounds, ModelParams
from ..experiments.dataset import sample_datapoints, spawn_rngs
from ..losses.losses import Datapoint, Epsilon, explicit_batch, violation_batch
from .distance import GraphGrid, graph_distance, graph_distances, oracle_slack

ZERO_TOL = 1e-12
FAR_DISTANCE = 0.01
CHUNK = 4096


@dataclass
class SandwichReport:
    passed: bool
    l_exp: float
    d2: float
    lower: float
    upper_margin: float
    lower_margin: float
    failed_side: str = ""


@dataclass
class QGCertificate:
    """Outcome of a sampled quadratic-growth check.

    worst_ratio is the largest (mu/2) * max(d^2 - slack, 0) / l_vimp over the
    samples (0/0 counts as 0); the certificate passes iff it is at most 1.
    """

    mu: float
    eps: Epsilon
    samples: int
    worst_ratio: float
    violations: List[Dict[str, float]] = field(default_factory=list)
    inconclusive: int = 0
    mean_d2: float = 0.0
    mean_loss: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations and self.worst_ratio <= 1.0

    @property
    def expectation_holds(self) -> bool:
        return self.mean_d2 <= (2.0 / self.mu) * self.mean_loss + 1e-12

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "eps": self.eps.value,
                    "mu": self.mu,
                    "samples": self.samples,
                    "worst_ratio": self.worst_ratio,
                    "violations": len(self.violations),
                    "inconclusive": self.inconclusive,
                    "mean_d2": self.mean_d2,
                    "mean_loss": self.mean_loss,
                    "expectation_holds": self.expectation_holds,
                    "passed": self.passed,
                }
            ]
        )


def lipschitz_f_x(params: ModelParams) -> float:
    """Largest Jacobian norm of f in x, attained on the contact branch."""
    return math.sqrt(1.0 / params.dt ** 2 + 1.0)


def qg_modulus(params: ModelParams, eps: Epsilon) -> float:
    """Quadratic-growth modulus of the violation loss w.r.t. graph distance."""
    m2, dt, e = params.m ** 2, params.dt, eps.value
    return min(m2 / (m2 / 2.0 + e), 2.0 / (1.0 + (2.0 * dt) ** 2), 1.0 / (4.0 * e), (m2 / 2.0) / e)


def epsilon_select(params: ModelParams) -> Epsilon:
    """Largest eps that keeps the violation loss 1-QG: min(1/4, m^2/2)."""
    return Epsilon(min(0.25, params.m ** 2 / 2.0))


def sandwich_check(
    params: ModelParams,
    d: Datapoint,
    bounds: DomainBounds,
    L_f_x: Optional[float] = None,
    grid: GraphGrid = GraphGrid(),
) -> SandwichReport:
    """Check l_exp >= d^2 >= l_exp / (1 + L_f_x^2) at one datapoint."""
    if L_f_x is None:
        L_f_x = lipschitz_f_x(params)
    result = graph_distance(params, d, bounds, grid)
    l_exp = float(explicit_batch(params, d.x.z, d.x.v, d.y.v_next).value)
    d2 = result.distance ** 2
    slack = float(oracle_slack(result.distance, result.resolution))
    lower = l_exp / (1.0 + L_f_x ** 2)
    upper_margin = l_exp + slack - d2
    lower_margin = d2 + slack - lower
    failed = ""
    if upper_margin < 0:
        failed = "upper"
    elif lower_margin < 0:
        failed = "lower"
    return SandwichReport(
        passed=not failed,
        l_exp=l_exp,
        d2=d2,
        lower=lower,
        upper_margin=upper_margin,
        lower_margin=lower_margin,
        failed_side=failed,
    )


def sandwich_sweep(
    params: ModelParams,
    bounds: DomainBounds,
    samples: int = 10_000,
    seed: int = 0,
    grid: GraphGrid = GraphGrid(),
    mode: str = "mixed",
    progress: bool = False,
) -> pd.DataFrame:
    """Sandwich inequality on sampled datapoints; one row per failing sample.

    Returns:
        DataFrame (z, v, y, l_exp, d2, lower, failed_side); empty when all pass.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    L = lipschitz_f_x(params)
    (rng,) = spawn_rngs(seed, 1)
    failures = []
    for start in tqdm(range(0, samples, CHUNK), desc="sandwich", disable=not progress):
        count = min(CHUNK, samples - start)
        z, v, y = sample_datapoints(params, bounds, count, rng, mode)
        batch = graph_distances(params, z, v, y, bounds, grid)
        l_exp = explicit_batch(params, z, v, y).value
        d2 = batch.distance ** 2
        slack = oracle_slack(batch.distance, batch.resolution)
        lower = l_exp / (1.0 + L * L)
        upper_bad = d2 > l_exp + slack
        lower_bad = d2 + slack < lower
        for i in np.flatnonzero(upper_bad | lower_bad):
            failures.append(
                {
                    "z": z[i],
                    "v": v[i],
                    "y": y[i],
                    "l_exp": l_exp[i],
                    "d2": d2[i],
                    "lower": lower[i],
                    "failed_side": "upper" if upper_bad[i] else "lower",
                }
            )
    return pd.DataFrame(failures, columns=["z", "v", "y", "l_exp", "d2", "lower", "failed_side"])


@dataclass
class ZeroSetReport:
    """Outcome of zero_set_check; violations list the offending samples with their kind."""

    passed: bool
    on_graph_samples: int
    on_graph_max_loss: float
    far_samples: int
    far_min_loss: float
    violations: List[Dict[str, float]] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "on_graph_samples": self.on_graph_samples,
                    "on_graph_max_loss": self.on_graph_max_loss,
                    "far_samples": self.far_samples,
                    "far_min_loss": self.far_min_loss,
                    "violations": len(self.violations),
                    "passed": self.passed,
                }
            ]
        )


def zero_set_check(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    samples: int = 100_000,
    seed: int = 0,
    grid: GraphGrid = GraphGrid(),
) -> ZeroSetReport:
    """The violation loss is zero on the graph and bounded away from zero off it.

    On-graph samples must have loss <= 1e-12 (rounding of the end gap is
    amplified by lambda / eps); samples at graph distance >= 0.01 must have
    strictly positive loss.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    on_rng, off_rng = spawn_rngs(seed, 2)
    n_on = max(1, samples // 2)
    n_off = max(1, samples - n_on)

    z, v, y = sample_datapoints(params, bounds, n_on, on_rng, "on_graph")
    on_loss = violation_batch(params, z, v, y, eps.value, bounds.b_lambda).value
    violations = [
        {"z": z[i], "v": v[i], "y": y[i], "loss": on_loss[i], "kind": "on_graph"}
        for i in np.flatnonzero(on_loss > ZERO_TOL)
    ]

    z, v, y = sample_datapoints(params, bounds, n_off, off_rng, "mixed")
    distance = graph_distances(params, z, v, y, bounds, grid).distance
    off_loss = violation_batch(params, z, v, y, eps.value, bounds.b_lambda).value
    far = distance >= FAR_DISTANCE
    violations += [
        {"z": z[i], "v": v[i], "y": y[i], "loss": off_loss[i], "kind": "off_graph"}
        for i in np.flatnonzero(far & ~(off_loss > 0))
    ]

    return ZeroSetReport(
        passed=not violations,
        on_graph_samples=n_on,
        on_graph_max_loss=float(on_loss.max()),
        far_samples=int(far.sum()),
        far_min_loss=float(off_loss[far].min()) if far.any() else math.inf,
        violations=violations,
    )


def qg_verify(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    samples: int = 100_000,
    seed: int = 0,
    grid: GraphGrid = GraphGrid(),
    mode: str = "mixed",
    progress: bool = False,
) -> QGCertificate:
    """Sampled check of d^2 <= (2 / mu) l_vimp with mu = qg_modulus(eps).

    Raises:
        ValueError: dt > 1/2 (the modulus is only valid for dt <= 1/2), or samples < 1
    """
    if params.dt > 0.5:
        raise ValueError(f"quadratic growth modulus requires dt <= 1/2, got {params.dt}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")

    mu = qg_modulus(params, eps)
    (rng,) = spawn_rngs(seed, 1)
    worst = 0.0
    violations = []
    inconclusive = 0
    sum_d2 = 0.0
    sum_loss = 0.0
    for start in tqdm(range(0, samples, CHUNK), desc="qg", disable=not progress):
        count = min(CHUNK, samples - start)
        z, v, y = sample_datapoints(params, bounds, count, rng, mode)
        batch = graph_distances(params, z, v, y, bounds, grid)
        loss = violation_batch(params, z, v, y, eps.value, bounds.b_lambda).value
        d2 = batch.distance ** 2
        excess = np.maximum(d2 - oracle_slack(batch.distance, batch.resolution), 0.0)

        scaled = 0.5 * mu * excess
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(scaled == 0.0, 0.0, scaled / loss)
        worst = max(worst, float(ratio.max()))
        inconclusive += int(batch.inconclusive.sum())
        sum_d2 += float(d2.sum())
        sum_loss += float(loss.sum())

        for i in np.flatnonzero(ratio > 1.0):
            violations.append(
                {"z": z[i], "v": v[i], "y": y[i], "d2": d2[i], "loss": loss[i], "ratio": ratio[i]}
            )

    return QGCertificate(
        mu=mu,
        eps=eps,
        samples=samples,
        worst_ratio=worst,
        violations=violations,
        inconclusive=inconclusive,
        mean_d2=sum_d2 / samples,
        mean_loss=sum_loss / samples,
    )


def epsilon_tradeoff(
    params: ModelParams,
    bounds: DomainBounds,
    eps_values: Sequence[float],
    n_ref: int = 1000,
    delta: float = 0.05,
) -> pd.DataFrame:
    """Graph fidelity (mu) against generalization (L_vimp, bound at n_ref) across eps."""
    rows = []
    for value in eps_values:
        eps = Epsilon(float(value))
        inputs = approach_inputs(params, bounds, eps, n=n_ref, delta=delta)["vimp"]
        rows.append(
            {
                "eps": eps.value,
                "mu": qg_modulus(params, eps),
                "L_vimp_theta": inputs.L_loss_theta,
                "B_vimp": inputs.B_loss,
                "bound_vimp": generalization_bound(inputs),
            }
        )
    return pd.DataFrame(rows, columns=["eps", "mu", "L_vimp_theta", "B_vimp", "bound_vimp"])


def graph_vs_prediction(
    params: ModelParams,
    z,
    v,
    y,
    bounds: DomainBounds,
    grid: GraphGrid = GraphGrid(),
) -> pd.DataFrame:
    """Per-point prediction loss next to squared graph distance.

    ratio = d^2 / l_exp (0 where l_exp is 0); stiff contact points have ratio << 1.
    """
    z, v, y = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (z, v, y))
    l_exp = explicit_batch(params, z, v, y).value
    d2 = graph_distances(params, z, v, y, bounds, grid).distance ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(l_exp == 0.0, 0.0, d2 / l_exp)
    return pd.DataFrame({"z": z, "v": v, "y": y, "l_exp": l_exp, "d2": d2, "ratio": ratio})
