"""The three training losses on the contact toy model.

* explicit: (y - f(x))^2
* naive implicit: (y - g(x, lambda*))^2, lambda* = argmin_lambda h(x, g(x, lambda), lambda)
* violation implicit: min_lambda (y - g(x, lambda))^2 + h(x, y, lambda) / eps

The impulse ranges over [-b_lambda, b_lambda]. Both embedded minimizations
are solved by enumerating the stationary point of every smooth piece, clamping
it into its piece and into that range, and keeping the best candidate.
The numpy batch functions below do the work; the scalar operations wrap a
single datapoint and return a LossEval.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from ..dynamics.contact_model import (
    DomainBounds,
    ModelParams,
    NextVelocity,
    State,
    contact_impulse_array,
    contact_term_array,
    end_gap_array,
    explicit_velocity_array,
    neg,
    pos,
    predict_velocity_array,
    violation_array,
)
from ..errors import InnerSolverError, NumericalFailure
from .solver import DEFAULT_TOL, scalar_minimize

LOSS_EXPLICIT = "exp"
LOSS_NAIVE_IMPLICIT = "nimp"
LOSS_VIOLATION = "vimp"
LOSS_KINDS = (LOSS_EXPLICIT, LOSS_NAIVE_IMPLICIT, LOSS_VIOLATION)


class Branch(str, Enum):
    """Active piece of the loss at the minimizing impulse."""

    LAMBDA_NEGATIVE = "lambda-negative"
    LAMBDA_ZERO = "lambda-zero"
    LAMBDA_POSITIVE = "lambda-positive"
    FREEFALL = "freefall"
    CONTACT = "contact"


# Integer codes used by the batch kernels, in Branch declaration order.
_BRANCHES = list(Branch)
_CODE = {branch: i for i, branch in enumerate(_BRANCHES)}


@dataclass(frozen=True)
class Datapoint:
    x: State
    y: NextVelocity

    @classmethod
    def of(cls, z: float, v: float, y: float) -> "Datapoint":
        return cls(State(float(z), float(v)), NextVelocity(float(y)))

    def is_finite(self) -> bool:
        return self.x.is_finite() and math.isfinite(self.y.v_next)


@dataclass(frozen=True)
class Epsilon:
    """Weight of the violation term; larger values trade fidelity for smoothness."""

    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"Epsilon must be finite and > 0, got {self.value!r}")


@dataclass(frozen=True)
class LossEval:
    """Loss value at one datapoint with its minimizing impulse.

    d_v, phi_next, d_z and d_z_next are the per-datapoint offsets used by the
    quadratic-growth argument: d_v = v' - v + a_grav*dt, phi_next = z + v'dt - theta,
    d_z = neg(z + (v - a_grav*dt)dt - theta) and d_z_next = -phi_next.
    """

    value: float
    lambda_star: float
    branch: Branch
    d_v: float
    phi_next: float
    d_z: float
    d_z_next: float


@dataclass
class LossBatch:
    value: np.ndarray
    lambda_star: np.ndarray
    branch_code: np.ndarray

    def branch(self, i: int) -> Branch:
        return _BRANCHES[int(self.branch_code[i])]

    def branch_names(self) -> np.ndarray:
        return np.array([b.value for b in _BRANCHES])[self.branch_code]


# ---------------------------------------------------------------------------
# batch kernels


def default_impulse_bound(params: ModelParams) -> float:
    """b_lambda of the default domain, ground at theta = 0."""
    return DomainBounds.from_params(params.with_theta(0.0)).b_lambda


def resolve_impulse_bound(params: ModelParams, impulse_bound: Optional[float]) -> float:
    if impulse_bound is None:
        return default_impulse_bound(params)
    if not impulse_bound > 0:
        raise ValueError(f"impulse_bound must be > 0, got {impulse_bound!r}")
    return float(impulse_bound)


def _clip(values: np.ndarray, impulse_bound: float) -> np.ndarray:
    return np.clip(values, -impulse_bound, impulse_bound)


def explicit_batch(params: ModelParams, z, v, y) -> LossBatch:
    z, v, y = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (z, v, y)))
    f = explicit_velocity_array(params, z, v)
    in_contact = contact_term_array(params, z, v) > 0
    return LossBatch(
        value=(y - f) ** 2,
        lambda_star=contact_impulse_array(params, z, v),
        branch_code=np.where(in_contact, _CODE[Branch.CONTACT], _CODE[Branch.FREEFALL]),
    )


def naive_impulse_batch(params: ModelParams, z, v, impulse_bound: Optional[float] = None) -> np.ndarray:
    """argmin over lambda of h(x, g(x, lambda), lambda), by region enumeration.

    With phi0 = z + (v - a_grav*dt)dt - theta the end gap at zero impulse, the
    stationary points of the four smooth pieces are

    * lambda>=0, phi<0: -m phi0 / dt (written as m * contact term, the impulse of f)
    * lambda<0, phi>=0: 0
    * lambda<0, phi<0: -m dt phi0 / (m^2 + dt^2)
    * lambda>=0, phi>=0: -m phi0 / (2 dt)

    Candidates are clamped into [-impulse_bound, impulse_bound], b_lambda of the
    default domain when None. Earlier candidates win ties, so the closing
    impulse of f is returned whenever it attains the minimum.
    """
    z, v = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(v, dtype=float))
    impulse_bound = resolve_impulse_bound(params, impulse_bound)
    m, dt = params.m, params.dt
    phi0 = end_gap_array(params, z, v - params.a_grav * dt)
    candidates = [
        contact_impulse_array(params, z, v),
        np.zeros_like(z),
        np.minimum(-m * dt * phi0 / (m * m + dt * dt), 0.0),
        pos(-m * phi0 / (2.0 * dt)),
    ]

    best = _clip(candidates[0], impulse_bound)
    best_h = violation_array(params, z, predict_velocity_array(params, v, best), best)
    for cand in candidates[1:]:
        cand = _clip(cand, impulse_bound)
        h = violation_array(params, z, predict_velocity_array(params, v, cand), cand)
        better = h < best_h
        best = np.where(better, cand, best)
        best_h = np.where(better, h, best_h)
    return best


def naive_implicit_batch(params: ModelParams, z, v, y, impulse_bound: Optional[float] = None) -> LossBatch:
    z, v, y = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (z, v, y)))
    impulse = naive_impulse_batch(params, z, v, impulse_bound)
    prediction = predict_velocity_array(params, v, impulse)
    return LossBatch(
        value=(y - prediction) ** 2,
        lambda_star=impulse,
        branch_code=np.where(impulse > 0, _CODE[Branch.CONTACT], _CODE[Branch.FREEFALL]),
    )


def violation_objective_array(params: ModelParams, z, v, y, impulse, eps: float):
    """(y - g(x, lambda))^2 + h(x, y, lambda) / eps, elementwise."""
    return (np.asarray(y, dtype=float) - predict_velocity_array(params, v, impulse)) ** 2 + violation_array(
        params, z, y, impulse
    ) / eps


def violation_batch(params: ModelParams, z, v, y, eps: float, impulse_bound: Optional[float] = None) -> LossBatch:
    """Violation loss by three-candidate enumeration.

    The objective is strictly convex in lambda with phi' fixed by the data, so
    the minimizer is one of

    * lambda- = 2 d_v / (m (1/eps + 2/m^2)), clamped to (-inf, 0]
    * lambda0 = 0
    * lambda+ = m (d_v - m pos(phi') / (2 eps)), clamped to [0, inf)

    each then clamped into [-impulse_bound, impulse_bound] (b_lambda of the
    default domain when None).
    """
    z, v, y = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (z, v, y)))
    impulse_bound = resolve_impulse_bound(params, impulse_bound)
    m = params.m
    d_v = y - v + params.a_grav * params.dt
    phi_next = end_gap_array(params, z, y)

    candidates = [
        np.zeros_like(z),
        np.minimum(2.0 * d_v / (m * (1.0 / eps + 2.0 / (m * m))), 0.0),
        pos(m * (d_v - m * pos(phi_next) / (2.0 * eps))),
    ]
    best = _clip(candidates[0], impulse_bound)
    best_value = violation_objective_array(params, z, v, y, best, eps)
    for cand in candidates[1:]:
        cand = _clip(cand, impulse_bound)
        value = violation_objective_array(params, z, v, y, cand, eps)
        better = value < best_value
        best = np.where(better, cand, best)
        best_value = np.where(better, value, best_value)

    code = np.where(
        best < 0,
        _CODE[Branch.LAMBDA_NEGATIVE],
        np.where(best > 0, _CODE[Branch.LAMBDA_POSITIVE], _CODE[Branch.LAMBDA_ZERO]),
    )
    return LossBatch(value=best_value, lambda_star=best, branch_code=code)


def evaluate_losses(
    params: ModelParams,
    z,
    v,
    y,
    kind: str,
    eps: Optional[Epsilon] = None,
    impulse_bound: Optional[float] = None,
) -> LossBatch:
    """Vectorized loss evaluation for one of LOSS_KINDS."""
    if kind == LOSS_EXPLICIT:
        return explicit_batch(params, z, v, y)
    if kind == LOSS_NAIVE_IMPLICIT:
        return naive_implicit_batch(params, z, v, y, impulse_bound)
    if kind == LOSS_VIOLATION:
        if eps is None:
            raise ValueError("violation loss requires eps")
        return violation_batch(params, z, v, y, eps.value, impulse_bound)
    raise ValueError(f"Unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")


# ---------------------------------------------------------------------------
# scalar operations


def _offsets(params: ModelParams, d: Datapoint) -> dict:
    z, v, y = d.x.z, d.x.v, d.y.v_next
    phi_next = float(end_gap_array(params, z, y))
    phi0 = float(end_gap_array(params, z, v - params.a_grav * params.dt))
    return {
        "d_v": y - v + params.a_grav * params.dt,
        "phi_next": phi_next,
        "d_z": float(neg(phi0)),
        "d_z_next": -phi_next,
    }


def _to_eval(params: ModelParams, d: Datapoint, batch: LossBatch) -> LossEval:
    return LossEval(
        value=float(batch.value),
        lambda_star=float(batch.lambda_star),
        branch=_BRANCHES[int(batch.branch_code)],
        **_offsets(params, d),
    )


def loss_explicit(params: ModelParams, d: Datapoint) -> LossEval:
    """Squared prediction error of the explicit map f."""
    return _to_eval(params, d, explicit_batch(params, d.x.z, d.x.v, d.y.v_next))


def naive_objective(params: ModelParams, d: Datapoint) -> Callable:
    """lambda -> h(x, g(x, lambda), lambda), the inner problem of the naive implicit loss."""

    def objective(impulse):
        return violation_array(params, d.x.z, predict_velocity_array(params, d.x.v, impulse), impulse)

    return objective


def violation_objective(params: ModelParams, d: Datapoint, eps: Epsilon) -> Callable:
    """lambda -> (y - g(x, lambda))^2 + h(x, y, lambda) / eps."""

    def objective(impulse):
        return violation_objective_array(params, d.x.z, d.x.v, d.y.v_next, impulse, eps.value)

    return objective


def cross_check_bracket(params: ModelParams, impulse_bound: Optional[float] = None) -> Tuple[float, float]:
    """The impulse set [-b, b] searched by the numeric solver."""
    radius = resolve_impulse_bound(params, impulse_bound)
    return -radius, radius


def loss_naive_implicit(
    params: ModelParams,
    d: Datapoint,
    impulse_bound: Optional[float] = None,
    solver: str = "closed_form",
    tol: float = DEFAULT_TOL,
) -> LossEval:
    """Prediction error of g at the impulse that minimizes the violation h.

    Args:
        params: model parameters (theta included)
        d: datapoint
        impulse_bound: restrict the impulse to [-b, b]; b_lambda of the default domain when None
        solver: "closed_form" (region enumeration) or "numeric" (scalar_minimize)
        tol: inner tolerance of the numeric solver

    Raises:
        InnerSolverError: the numeric inner minimization failed
    """
    if solver == "closed_form":
        return _to_eval(params, d, naive_implicit_batch(params, d.x.z, d.x.v, d.y.v_next, impulse_bound))
    if solver != "numeric":
        raise ValueError(f"Unknown solver {solver!r}; expected 'closed_form' or 'numeric'")

    lo, hi = cross_check_bracket(params, impulse_bound)
    try:
        impulse, _ = scalar_minimize(naive_objective(params, d), (lo, hi), tol=tol)
    except NumericalFailure as exc:
        raise InnerSolverError(str(exc), theta=params.theta) from exc

    prediction = float(predict_velocity_array(params, d.x.v, impulse))
    return LossEval(
        value=(d.y.v_next - prediction) ** 2,
        lambda_star=impulse,
        branch=Branch.CONTACT if impulse > tol else Branch.FREEFALL,
        **_offsets(params, d),
    )


def loss_violation(
    params: ModelParams,
    d: Datapoint,
    eps: Epsilon,
    impulse_bound: Optional[float] = None,
) -> LossEval:
    """Joint minimum over lambda of prediction error plus violation / eps.

    Zero exactly on the graph of f and strictly positive off it.
    """
    return _to_eval(params, d, violation_batch(params, d.x.z, d.x.v, d.y.v_next, eps.value, impulse_bound))
