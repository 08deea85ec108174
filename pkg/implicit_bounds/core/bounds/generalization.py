"""Generalization-error bound calculator and its sweeps."""

import math
from dataclasses import dataclass, replace
from typing import Dict, Mapping, Sequence

import pandas as pd

from ..dynamics.contact_model import DomainBounds, ModelParams
from ..losses.losses import LOSS_KINDS, Epsilon
from .lipschitz import loss_constants

RADEMACHER_CONSTANT = 44.0


@dataclass(frozen=True)
class BoundInputs:
    """Inputs of the bound for one approach.

    Attributes:
        delta: failure probability in (0, 1]; delta = 1 drops the confidence term
        n: dataset size
        k: parameter dimension
        b_theta: parameter-norm bound
        L_loss_theta: Lipschitz constant of the loss in theta
        B_loss: supremum of the loss
    """

    delta: float
    n: int
    k: int
    b_theta: float
    L_loss_theta: float
    B_loss: float

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must be in (0, 1], got {self.delta!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k!r}")
        for name in ("b_theta", "L_loss_theta", "B_loss"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")

    def with_n(self, n: int) -> "BoundInputs":
        return replace(self, n=int(n))

    def with_delta(self, delta: float) -> "BoundInputs":
        return replace(self, delta=float(delta))


def generalization_bound(inputs: BoundInputs) -> float:
    """44 L B_theta sqrt(k/n) + B sqrt(log(1/delta) / (2n))."""
    complexity = RADEMACHER_CONSTANT * inputs.L_loss_theta * inputs.b_theta * math.sqrt(inputs.k / inputs.n)
    confidence = inputs.B_loss * math.sqrt(math.log(1.0 / inputs.delta) / (2.0 * inputs.n))
    return complexity + confidence


def approach_inputs(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    n: int = 1000,
    delta: float = 0.05,
    k: int = 1,
) -> Dict[str, BoundInputs]:
    """BoundInputs for exp, nimp and vimp from the closed-form constants."""
    _, suprema, loss_lip = loss_constants(params, bounds, eps)
    B = {"exp": suprema.B_exp, "nimp": suprema.B_nimp, "vimp": suprema.B_vimp}
    return {
        kind: BoundInputs(
            delta=delta,
            n=n,
            k=k,
            b_theta=bounds.b_theta,
            L_loss_theta=loss_lip.for_kind(kind),
            B_loss=B[kind],
        )
        for kind in LOSS_KINDS
    }


def bound_curve(sweep: Sequence[float], per_approach: Mapping[str, BoundInputs], over: str = "n") -> pd.DataFrame:
    """Bound per approach at each sweep value.

    Args:
        sweep: nonempty sequence of n values (over="n") or delta values (over="delta")
        per_approach: approach name -> BoundInputs template
        over: which input the sweep replaces

    Returns:
        DataFrame with the sweep column followed by one column per approach
    """
    if len(sweep) == 0:
        raise ValueError("sweep is empty")
    if over not in ("n", "delta"):
        raise ValueError(f"over must be 'n' or 'delta', got {over!r}")

    rows = []
    for value in sweep:
        row = {over: value}
        for name, template in per_approach.items():
            inputs = template.with_n(value) if over == "n" else template.with_delta(value)
            row[name] = generalization_bound(inputs)
        rows.append(row)
    return pd.DataFrame(rows, columns=[over, *per_approach.keys()])


def dt_scaling(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    dts: Sequence[float] = (0.05, 0.005, 0.0005, 0.00005),
) -> pd.DataFrame:
    """How the loss Lipschitz constants move as the time step shrinks.

    lambda_max is rebuilt for each dt; the other domain limits are held fixed.
    L_exp * dt settles to a constant while L_vimp stays bounded.
    """
    rows = []
    for dt in dts:
        at_dt = replace(params, dt=float(dt))
        at_bounds = DomainBounds.from_params(
            at_dt,
            phi_max=bounds.phi_max,
            v_max=bounds.v_max,
            b_theta=bounds.b_theta,
            penetration=params.theta - bounds.z_lo,
        )
        _, _, loss_lip = loss_constants(at_dt, at_bounds, eps)
        rows.append(
            {
                "dt": float(dt),
                "lambda_max": at_bounds.lambda_max,
                "L_exp_theta": loss_lip.L_exp_theta,
                "L_exp_theta_times_dt": loss_lip.L_exp_theta * dt,
                "L_nimp_theta": loss_lip.L_nimp_theta,
                "L_vimp_theta": loss_lip.L_vimp_theta,
            }
        )
    return pd.DataFrame(rows)
