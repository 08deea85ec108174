"""Monte-Carlo certification of the closed-form constants.

lipschitz_validate compares finite-difference slopes of each loss in theta with
its closed-form Lipschitz constant; empirical_suprema compares sampled maxima of
f, h and the losses with loss_suprema.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..dynamics.contact_model import DomainBounds, ModelParams, end_gap_array, explicit_velocity_array, violation_array
from ..experiments.dataset import spawn_rngs
from ..losses.losses import LOSS_KINDS, Epsilon, evaluate_losses
from .lipschitz import loss_constants

DEFAULT_DTHETA = 1e-6
SLOPE_SLACK = 1e-3
CHUNK = 100_000


@dataclass
class LipschitzValidation:
    """Per-approach comparison of empirical slopes with the closed form.

    summary has one row per approach; violations lists every sample whose
    slope exceeded L * (1 + 1e-3), with its inputs.
    """

    summary: pd.DataFrame
    violations: pd.DataFrame = field(default_factory=pd.DataFrame)

    @property
    def passed(self) -> bool:
        return bool(self.summary["passed"].all())


def finite_difference_slopes(
    params: ModelParams,
    z: np.ndarray,
    v: np.ndarray,
    y: np.ndarray,
    kind: str,
    eps: Optional[Epsilon] = None,
    dtheta: float = DEFAULT_DTHETA,
    impulse_bound: Optional[float] = None,
):
    """|loss(theta + dtheta) - loss(theta)| / dtheta per sample, and a same-branch mask."""
    here = evaluate_losses(params, z, v, y, kind, eps, impulse_bound)
    there = evaluate_losses(params.with_theta(params.theta + dtheta), z, v, y, kind, eps, impulse_bound)
    slopes = np.abs(there.value - here.value) / dtheta
    return slopes, here.branch_code == there.branch_code


def _sample_box(params: ModelParams, bounds: DomainBounds, n: int, rng: np.random.Generator):
    # theta varies over the parameter box; the state box moves with it.
    theta = rng.uniform(-bounds.b_theta, bounds.b_theta, size=n)
    offset_lo = bounds.z_lo - params.theta
    offset_hi = bounds.z_hi - params.theta
    z = theta + rng.uniform(offset_lo, offset_hi, size=n)
    v = rng.uniform(-bounds.v_max, bounds.v_max, size=n)
    y = rng.uniform(-bounds.v_max, bounds.v_max, size=n)
    return theta, z, v, y


def lipschitz_validate(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    samples: int = 100_000,
    seed: int = 0,
    dtheta: float = DEFAULT_DTHETA,
    progress: bool = False,
) -> LipschitzValidation:
    """Empirical max |dloss/dtheta| per approach against the closed form.

    Args:
        params: model constants (theta is resampled per datapoint)
        bounds: data/parameter domain
        eps: violation weight
        samples: number of (x, y, theta) samples, >= 1
        seed: RNG seed
        dtheta: forward-difference step
        progress: show a tqdm bar over sample chunks

    Returns:
        LipschitzValidation with one summary row per approach
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")

    _, _, loss_lip = loss_constants(params, bounds, eps)
    (rng,) = spawn_rngs(seed, 1)
    base = params.with_theta(0.0)

    stats = {kind: {"max": 0.0, "max_same": 0.0, "same": 0} for kind in LOSS_KINDS}
    violations = []
    chunks = range(0, samples, CHUNK)
    for start in tqdm(chunks, desc="lipschitz", disable=not progress):
        count = min(CHUNK, samples - start)
        theta, z, v, y = _sample_box(params, bounds, count, rng)
        # Loss depends on (z - theta) only, so evaluate at theta = 0 on shifted heights.
        z_rel = z - theta
        for kind in LOSS_KINDS:
            limit = loss_lip.for_kind(kind) * (1.0 + SLOPE_SLACK)
            slopes, same = finite_difference_slopes(base, z_rel, v, y, kind, eps, dtheta, bounds.b_lambda)
            stats[kind]["max"] = max(stats[kind]["max"], float(slopes.max()))
            if same.any():
                stats[kind]["max_same"] = max(stats[kind]["max_same"], float(slopes[same].max()))
            stats[kind]["same"] += int(same.sum())
            for i in np.flatnonzero(slopes > limit):
                violations.append(
                    {"approach": kind, "z": z[i], "v": v[i], "y": y[i], "theta": theta[i], "slope": slopes[i], "limit": limit}
                )

    rows = []
    for kind in LOSS_KINDS:
        closed_form = loss_lip.for_kind(kind)
        n_bad = sum(1 for row in violations if row["approach"] == kind)
        rows.append(
            {
                "approach": kind,
                "closed_form": closed_form,
                "empirical_max_slope": stats[kind]["max"],
                "empirical_max_slope_same_branch": stats[kind]["max_same"],
                "samples": samples,
                "same_branch_samples": stats[kind]["same"],
                "violations": n_bad,
                "passed": n_bad == 0,
            }
        )
    return LipschitzValidation(
        summary=pd.DataFrame(rows),
        violations=pd.DataFrame(violations, columns=["approach", "z", "v", "y", "theta", "slope", "limit"]),
    )


def empirical_suprema(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    samples: int = 1_000_000,
    seed: int = 0,
) -> pd.DataFrame:
    """Sampled maxima of |f|, h and the losses next to the analytic suprema.

    States are uniform on the box, outputs uniform on [-v_max, v_max] and
    impulses for h uniform on [-lambda_max, lambda_max], the range B_h is taken
    over. The implicit losses minimize over [-b_lambda, b_lambda]. Samples with
    |phi'| > phi_max are outside the domain and dropped.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    _, suprema, _ = loss_constants(params, bounds, eps)
    (rng,) = spawn_rngs(seed, 1)

    z = rng.uniform(bounds.z_lo, bounds.z_hi, size=samples)
    v = rng.uniform(-bounds.v_max, bounds.v_max, size=samples)
    y = rng.uniform(-bounds.v_max, bounds.v_max, size=samples)
    impulse = rng.uniform(-bounds.lambda_max, bounds.lambda_max, size=samples)
    keep = np.abs(end_gap_array(params, z, y)) <= bounds.phi_max
    z, v, y, impulse = z[keep], v[keep], y[keep], impulse[keep]

    empirical: Dict[str, float] = {
        "B_f": float(np.abs(explicit_velocity_array(params, z, v)).max()),
        "B_h": float(violation_array(params, z, y, impulse).max()),
        "B_exp": float(evaluate_losses(params, z, v, y, "exp").value.max()),
        "B_nimp": float(evaluate_losses(params, z, v, y, "nimp", impulse_bound=bounds.b_lambda).value.max()),
        "B_vimp": float(evaluate_losses(params, z, v, y, "vimp", eps, bounds.b_lambda).value.max()),
    }
    analytic = suprema.as_dict()
    rows = [
        {
            "quantity": name,
            "analytic": analytic[name],
            "empirical": value,
            "dominates": analytic[name] >= value,
            "samples": int(keep.sum()),
        }
        for name, value in empirical.items()
    ]
    return pd.DataFrame(rows, columns=["quantity", "analytic", "empirical", "dominates", "samples"])
