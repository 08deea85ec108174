"""Point mass falling onto a flat ground: LCP time stepping in closed form.

The state is x = [z; v] (height, velocity) and the output is y = v', the
velocity after one step of length dt. The ground height theta is the only
learnable parameter. Three views of the same dynamics live here:

* f: the explicit one-step map (LCP solution in closed form),
* g: the implicit prediction from an impulse lambda,
* h: the complementarity violation of (gap, impulse) at the end of the step.

Every scalar operation has a numpy kernel (``*_array``) underneath so that
sweeps over 1e5 datapoints stay vectorized.
"""

import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

# Region labels for the four smooth pieces of h. Zero counts as the
# nonnegative side for both the impulse and the gap.
REGION_NEG_LAMBDA_NEG_PHI = "lambda<0,phi<0"
REGION_NEG_LAMBDA_POS_PHI = "lambda<0,phi>=0"
REGION_POS_LAMBDA_NEG_PHI = "lambda>=0,phi<0"
REGION_POS_LAMBDA_POS_PHI = "lambda>=0,phi>=0"


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the toy system and the ground height theta."""

    m: float = 1.0
    dt: float = 0.005
    a_grav: float = 9.81
    theta: float = 0.0

    def __post_init__(self):
        for name in ("m", "dt", "a_grav"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"ModelParams.{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.theta):
            raise ValueError(f"ModelParams.theta must be finite, got {self.theta!r}")

    def with_theta(self, theta: float) -> "ModelParams":
        return replace(self, theta=float(theta))


@dataclass(frozen=True)
class DomainBounds:
    """Boxed data/parameter/impulse domain over which suprema are taken.

    Attributes:
        phi_max: largest gap magnitude in the data domain (m)
        v_max: largest speed (m/s)
        lambda_max: largest contact impulse over the domain (N*s)
        b_theta: parameter-norm bound
        b_lambda: half-width of the impulse set searched by the implicit losses, at least lambda_max
        z_lo, z_hi: position box (m)
    """

    phi_max: float
    v_max: float
    lambda_max: float
    b_theta: float
    b_lambda: float
    z_lo: float
    z_hi: float

    def __post_init__(self):
        for name in ("phi_max", "v_max", "lambda_max", "b_theta", "b_lambda"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"DomainBounds.{name} must be finite and > 0, got {value!r}")
        if self.b_lambda < self.lambda_max:
            raise ValueError(
                f"DomainBounds.b_lambda ({self.b_lambda}) must be >= lambda_max ({self.lambda_max})"
            )
        if not self.z_hi > self.z_lo:
            raise ValueError(f"DomainBounds position box is empty: [{self.z_lo}, {self.z_hi}]")

    @classmethod
    def from_params(
        cls,
        params: ModelParams,
        phi_max: float = 8.0,
        v_max: float = 15.0,
        b_theta: float = 8.0,
        lambda_max: Optional[float] = None,
        b_lambda: Optional[float] = None,
        penetration: float = 0.1,
    ) -> "DomainBounds":
        """Build the data domain around params.theta.

        lambda_max defaults to m * (v_max + a_grav * dt), the largest impulse
        needed to stop the fastest admissible approach in one step. b_lambda
        defaults to the largest contact impulse over the position box and every
        ground height in [-b_theta, b_theta], so the LCP impulse of f stays
        inside [-b_lambda, b_lambda] wherever theta is evaluated:
        m * (v_max + a_grav * dt + max(penetration, b_theta - z_lo) / dt), at least lambda_max.
        """
        if lambda_max is None:
            lambda_max = params.m * (v_max + params.a_grav * params.dt)
        z_lo = params.theta - penetration
        if b_lambda is None:
            reach = max(penetration, b_theta - z_lo)
            b_lambda = max(lambda_max, params.m * (v_max + params.a_grav * params.dt + reach / params.dt))
        return cls(
            phi_max=float(phi_max),
            v_max=float(v_max),
            lambda_max=float(lambda_max),
            b_theta=float(b_theta),
            b_lambda=float(b_lambda),
            z_lo=z_lo,
            z_hi=params.theta + phi_max,
        )

    def search_box(self, enlarge: float = 0.2):
        """(z_lo, z_hi, v_lo, v_hi) enlarged by ``enlarge`` of the width on each side."""
        z_pad = enlarge * (self.z_hi - self.z_lo)
        v_pad = enlarge * 2.0 * self.v_max
        return (
            self.z_lo - z_pad,
            self.z_hi + z_pad,
            -self.v_max - v_pad,
            self.v_max + v_pad,
        )


@dataclass(frozen=True)
class State:
    z: float
    v: float

    def is_finite(self) -> bool:
        return math.isfinite(self.z) and math.isfinite(self.v)


@dataclass(frozen=True)
class NextVelocity:
    v_next: float


@dataclass(frozen=True)
class GapPair:
    """End-of-step signed gap and contact impulse."""

    phi: float
    impulse: float

    @classmethod
    def from_step(cls, params: ModelParams, x: State, y: NextVelocity, impulse: float) -> "GapPair":
        return cls(phi=float(end_gap_array(params, x.z, y.v_next)), impulse=float(impulse))

    @property
    def region(self) -> str:
        return region_label(self.impulse, self.phi)


@dataclass(frozen=True)
class HPartials:
    dh_dlambda: float
    dh_dtheta: float
    region: str


# ---------------------------------------------------------------------------
# numpy kernels


def pos(value):
    return np.maximum(value, 0.0)


def neg(value):
    return np.maximum(-np.asarray(value, dtype=float), 0.0)


def contact_term_array(params: ModelParams, z, v):
    """Argument of pos() in the explicit map: -v + a_grav*dt + (theta - z)/dt."""
    return -np.asarray(v, dtype=float) + params.a_grav * params.dt + (params.theta - np.asarray(z, dtype=float)) / params.dt


def explicit_velocity_array(params: ModelParams, z, v):
    """f(x) = v - a_grav*dt + pos(-v + a_grav*dt + (theta - z)/dt)."""
    v = np.asarray(v, dtype=float)
    return v - params.a_grav * params.dt + pos(contact_term_array(params, z, v))


def contact_impulse_array(params: ModelParams, z, v):
    """Impulse implied by the explicit map: m * pos(contact term)."""
    return params.m * pos(contact_term_array(params, z, v))


def predict_velocity_array(params: ModelParams, v, impulse):
    """g(x, lambda) = v - a_grav*dt + lambda/m."""
    return np.asarray(v, dtype=float) - params.a_grav * params.dt + np.asarray(impulse, dtype=float) / params.m


def end_gap_array(params: ModelParams, z, y):
    """phi' = z + v' * dt - theta."""
    return np.asarray(z, dtype=float) + np.asarray(y, dtype=float) * params.dt - params.theta


def violation_array(params: ModelParams, z, y, impulse):
    """h(x, y, lambda) = 1/2 neg(phi')^2 + 1/2 neg(lambda)^2 + pos(phi') pos(lambda)."""
    phi = end_gap_array(params, z, y)
    impulse = np.asarray(impulse, dtype=float)
    return 0.5 * neg(phi) ** 2 + 0.5 * neg(impulse) ** 2 + pos(phi) * pos(impulse)


def region_label(impulse: float, phi: float) -> str:
    if impulse < 0:
        return REGION_NEG_LAMBDA_NEG_PHI if phi < 0 else REGION_NEG_LAMBDA_POS_PHI
    return REGION_POS_LAMBDA_NEG_PHI if phi < 0 else REGION_POS_LAMBDA_POS_PHI


# ---------------------------------------------------------------------------
# scalar operations


def step_explicit(params: ModelParams, x: State) -> NextVelocity:
    """One LCP time step of the explicit dynamics f."""
    return NextVelocity(float(explicit_velocity_array(params, x.z, x.v)))


def g_eval(params: ModelParams, x: State, impulse: float) -> NextVelocity:
    """Implicit prediction g(x, lambda); independent of z and theta."""
    return NextVelocity(float(predict_velocity_array(params, x.v, impulse)))


def h_eval(params: ModelParams, x: State, y: NextVelocity, impulse: float) -> float:
    """Complementarity violation h(x, y, lambda); zero iff the pair is complementary."""
    return float(violation_array(params, x.z, y.v_next, impulse))


def contact_impulse(params: ModelParams, x: State) -> float:
    return float(contact_impulse_array(params, x.z, x.v))


def h_partials(params: ModelParams, x: State, y: NextVelocity, impulse: float) -> HPartials:
    """Piecewise derivatives of h with respect to lambda and theta.

    With phi' = z + v'dt - theta held at the given output v':

    ===================  ==========  ==========
    region               dh/dlambda  dh/dtheta
    ===================  ==========  ==========
    lambda<0, phi<0      lambda      -phi
    lambda<0, phi>=0     lambda      0
    lambda>=0, phi<0     0           -phi
    lambda>=0, phi>=0    phi         -lambda
    ===================  ==========  ==========
    """
    phi = float(end_gap_array(params, x.z, y.v_next))
    region = region_label(impulse, phi)
    if region == REGION_NEG_LAMBDA_NEG_PHI:
        return HPartials(impulse, -phi, region)
    if region == REGION_NEG_LAMBDA_POS_PHI:
        return HPartials(impulse, 0.0, region)
    if region == REGION_POS_LAMBDA_NEG_PHI:
        return HPartials(0.0, -phi, region)
    return HPartials(phi, -float(impulse), region)


def simulate_trajectory(params: ModelParams, x0: State, steps: int) -> List[State]:
    """Roll the explicit dynamics forward, updating z with the new velocity.

    Returns steps + 1 states starting at x0.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if not x0.is_finite():
        raise ValueError(f"initial state must be finite, got {x0}")

    trajectory = [x0]
    state = x0
    for _ in range(steps):
        v_next = step_explicit(params, state).v_next
        state = State(z=state.z + v_next * params.dt, v=v_next)
        trajectory.append(state)
    return trajectory
