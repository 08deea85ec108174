"""Closed-form Lipschitz constants and loss suprema for the contact toy model.

Everything here is arithmetic on ModelParams, DomainBounds and Epsilon. The
Monte-Carlo cross-check of the suprema lives in validation.py.
"""

from dataclasses import asdict, dataclass
from typing import Dict

import pandas as pd

from ..dynamics.contact_model import DomainBounds, ModelParams
from ..errors import SingularCurvatureError
from ..losses.losses import Epsilon

CURVATURE_FLOOR = 1e-12

TABLE_COLUMNS = (
    "L_f_theta",
    "L_g_lambda",
    "L_g_theta",
    "L_h_lambda",
    "L_h_theta",
    "L_lambda_theta_nimp",
    "L_lambda_theta_vimp",
)


@dataclass(frozen=True)
class LipschitzTable:
    """Lipschitz constants of f, g, h and of the optimal impulse in theta.

    mass, dt, lambda_max and eps record the inputs the constants were built from.
    """

    L_f_theta: float
    L_g_lambda: float
    L_g_theta: float
    L_h_lambda: float
    L_h_theta: float
    L_lambda_theta_nimp: float
    L_lambda_theta_vimp: float
    mass: float
    dt: float
    lambda_max: float
    eps: float

    def constants(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in TABLE_COLUMNS}

    def to_frame(self) -> pd.DataFrame:
        """One row per constant: name, value."""
        return pd.DataFrame(
            [{"constant": name, "value": value} for name, value in self.constants().items()],
            columns=["constant", "value"],
        )


@dataclass(frozen=True)
class LossBounds:
    B_exp: float
    B_nimp: float
    B_vimp: float
    B_f: float
    B_g: float
    B_h: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class LossLipschitz:
    """Loss Lipschitz constants in theta, toy closed form and general form side by side."""

    L_exp_theta: float
    L_nimp_theta: float
    L_vimp_theta: float
    general_exp_theta: float
    general_nimp_theta: float
    general_vimp_theta: float

    def for_kind(self, kind: str) -> float:
        return {"exp": self.L_exp_theta, "nimp": self.L_nimp_theta, "vimp": self.L_vimp_theta}[kind]


def lipschitz_table(params: ModelParams, bounds: DomainBounds, eps: Epsilon) -> LipschitzTable:
    """Lipschitz constants of the toy model.

    L_h is bounded by the larger of the gap and impulse ranges; the impulse
    sensitivities are the worst case over the smooth regions of h.
    """
    m, dt = params.m, params.dt
    L_h = max(bounds.phi_max, bounds.lambda_max)
    return LipschitzTable(
        L_f_theta=1.0 / dt,
        L_g_lambda=1.0 / m,
        L_g_theta=0.0,
        L_h_lambda=L_h,
        L_h_theta=L_h,
        L_lambda_theta_nimp=max(m * dt / (m * m + dt * dt), m / dt),
        L_lambda_theta_vimp=m * m / (2.0 * eps.value),
        mass=m,
        dt=dt,
        lambda_max=bounds.lambda_max,
        eps=eps.value,
    )


def lambda_sensitivity(d2h_dlambda2: float, d2h_dtheta_dlambda: float) -> float:
    """d lambda* / d theta = -(d2h/dlambda2)^-1 * d2h/(dtheta dlambda).

    Raises:
        SingularCurvatureError: |d2h/dlambda2| < 1e-12
    """
    if abs(d2h_dlambda2) < CURVATURE_FLOOR:
        raise SingularCurvatureError(
            f"inner curvature {d2h_dlambda2!r} is below {CURVATURE_FLOOR}; sensitivity undefined"
        )
    return -d2h_dtheta_dlambda / d2h_dlambda2


def sensitivity_by_region(params: ModelParams, eps: Epsilon) -> pd.DataFrame:
    """Per-region second partials of both inner problems and the resulting d lambda*/d theta.

    The naive problem minimizes h(x, g(x, lambda), lambda), so the gap moves
    with lambda; the violation problem fixes the gap at the data output.
    """
    m, dt, e = params.m, params.dt, eps.value
    # (approach, region, d2/dlambda2, d2/(dtheta dlambda))
    second_partials = [
        ("nimp", "lambda<0,phi<0", dt * dt / (m * m) + 1.0, -dt / m),
        ("nimp", "lambda<0,phi>=0", 1.0, 0.0),
        ("nimp", "lambda>=0,phi<0", dt * dt / (m * m), -dt / m),
        ("nimp", "lambda>=0,phi>=0", 2.0 * dt / m, -1.0),
        ("vimp", "lambda<0,phi<0", 2.0 / (m * m) + 1.0 / e, 0.0),
        ("vimp", "lambda<0,phi>=0", 2.0 / (m * m) + 1.0 / e, 0.0),
        ("vimp", "lambda>=0,phi<0", 2.0 / (m * m), 0.0),
        ("vimp", "lambda>=0,phi>=0", 2.0 / (m * m), -1.0 / e),
    ]
    rows = [
        {
            "approach": approach,
            "region": region,
            "d2_lambda": d2,
            "d2_theta_lambda": cross,
            "sensitivity": lambda_sensitivity(d2, cross),
        }
        for approach, region, d2, cross in second_partials
    ]
    return pd.DataFrame(rows, columns=["approach", "region", "d2_lambda", "d2_theta_lambda", "sensitivity"])


def loss_suprema(params: ModelParams, bounds: DomainBounds, eps: Epsilon) -> LossBounds:
    """Conservative analytic suprema of f, g, h and the three losses over the domain box.

    |f| and |g| are bounded by v_max + a_grav*dt + impulse/m, so the squared
    prediction errors are bounded by (v_max + B_f)^2. The violation loss is no
    larger than its objective at lambda = 0.
    """
    drift = bounds.v_max + params.a_grav * params.dt
    B_f = drift + bounds.lambda_max / params.m
    B_g = drift + bounds.b_lambda / params.m
    B_exp = (bounds.v_max + B_f) ** 2
    B_nimp = B_exp
    B_h = max(
        0.5 * bounds.phi_max ** 2,
        0.5 * bounds.lambda_max ** 2,
        bounds.phi_max * bounds.lambda_max,
    )
    return LossBounds(
        B_exp=B_exp,
        B_nimp=B_nimp,
        B_vimp=B_nimp + B_h / eps.value,
        B_f=B_f,
        B_g=B_g,
        B_h=B_h,
    )


def loss_lipschitz(table: LipschitzTable, loss_bounds: LossBounds, eps: Epsilon) -> LossLipschitz:
    """Loss Lipschitz constants in theta.

    The general form composes the table entries; the toy form is its
    simplification with L_h = lambda_max. Both agree whenever lambda_max >= phi_max.
    """
    e = eps.value
    m, dt = table.mass, table.dt
    B_exp, B_nimp = loss_bounds.B_exp, loss_bounds.B_nimp

    general_exp = 2.0 * B_exp * table.L_f_theta
    general_nimp = 2.0 * B_nimp * (table.L_g_lambda * table.L_lambda_theta_nimp + table.L_g_theta)
    general_vimp = 2.0 * B_nimp * (table.L_g_lambda * table.L_lambda_theta_vimp + table.L_g_theta) + (
        table.L_h_lambda * table.L_lambda_theta_vimp + table.L_h_theta
    ) / e

    return LossLipschitz(
        L_exp_theta=2.0 * B_exp / dt,
        L_nimp_theta=2.0 * B_nimp / dt,
        L_vimp_theta=(m * B_nimp + table.lambda_max * (1.0 + m * m / (2.0 * e))) / e,
        general_exp_theta=general_exp,
        general_nimp_theta=general_nimp,
        general_vimp_theta=general_vimp,
    )


def loss_constants(params: ModelParams, bounds: DomainBounds, eps: Epsilon):
    """(LipschitzTable, LossBounds, LossLipschitz) for one configuration."""
    table = lipschitz_table(params, bounds, eps)
    suprema = loss_suprema(params, bounds, eps)
    return table, suprema, loss_lipschitz(table, suprema, eps)
