"""Synthetic datasets for the contact toy model.

Two entry points:

* generate_dataset: the training/held-out distribution, with a controllable
  share of states that hit the ground during the step and errors-in-variables
  noise on both input and output.
* sample_datapoints: raw (z, v, y) arrays over the domain box for certification
  sweeps, with y on, near, or far from the graph of f.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..dynamics.contact_model import DomainBounds, ModelParams, contact_term_array, explicit_velocity_array
from ..losses.losses import Datapoint

SAMPLE_MODES = ("on_graph", "near_graph", "uniform", "mixed")


@dataclass(frozen=True)
class NoiseConfig:
    sigma_x: float = 0.0
    sigma_y: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_x < 0 or self.sigma_y < 0:
            raise ValueError(f"noise sigmas must be >= 0, got sigma_x={self.sigma_x}, sigma_y={self.sigma_y}")


@dataclass
class Dataset:
    points: List[Datapoint]
    theta_true: float
    noise: NoiseConfig
    contact_fraction: float
    z: np.ndarray = field(repr=False, default=None)
    v: np.ndarray = field(repr=False, default=None)
    y: np.ndarray = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.points)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.z, self.v, self.y


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """Independent generators split from one seed; stable across runs and platforms."""
    return [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(count)]


def to_datapoints(z: Sequence[float], v: Sequence[float], y: Sequence[float]) -> List[Datapoint]:
    return [Datapoint.of(zi, vi, yi) for zi, vi, yi in zip(z, v, y)]


def _uniform_states(bounds: DomainBounds, n: int, rng: np.random.Generator):
    z = rng.uniform(bounds.z_lo, bounds.z_hi, size=n)
    v = rng.uniform(-bounds.v_max, bounds.v_max, size=n)
    return z, v


def _contact_states(params: ModelParams, bounds: DomainBounds, n: int, rng: np.random.Generator):
    # Start within one step of travel from the ground, with a velocity low
    # enough that the step ends in contact.
    reach = bounds.v_max * params.dt
    s = rng.uniform(-reach, reach, size=n)
    z = params.theta + s
    v_hi = np.minimum(bounds.v_max, params.a_grav * params.dt - s / params.dt)
    v = -bounds.v_max + rng.uniform(0.0, 1.0, size=n) * (v_hi - (-bounds.v_max))
    return z, v


def generate_dataset(
    params: ModelParams,
    bounds: DomainBounds,
    n: int,
    noise: NoiseConfig = NoiseConfig(),
    contact_bias: float = 0.5,
) -> Dataset:
    """Simulate n one-step transitions at params.theta.

    Each point is a contact point with probability contact_bias, otherwise a
    uniform draw from the domain box. Outputs are the explicit step plus
    N(0, sigma_y); inputs get N(0, sigma_x) after simulation.

    Args:
        params: model with the generating ground height
        bounds: data domain
        n: number of points (>= 1)
        noise: noise levels and seed
        contact_bias: share of points forced into contact, in [0, 1]

    Returns:
        Dataset; with zero noise every point lies on the graph of f.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= contact_bias <= 1.0:
        raise ValueError(f"contact_bias must be in [0, 1], got {contact_bias}")

    pick_rng, state_rng, contact_rng, y_rng, x_rng = spawn_rngs(noise.seed, 5)

    biased = pick_rng.uniform(size=n) < contact_bias
    z, v = _uniform_states(bounds, n, state_rng)
    cz, cv = _contact_states(params, bounds, n, contact_rng)
    z = np.where(biased, cz, z)
    v = np.where(biased, cv, v)

    y = explicit_velocity_array(params, z, v)
    contact_fraction = float(np.mean(contact_term_array(params, z, v) > 0))

    if noise.sigma_y > 0:
        y = y + y_rng.normal(0.0, noise.sigma_y, size=n)
    if noise.sigma_x > 0:
        z = z + x_rng.normal(0.0, noise.sigma_x, size=n)
        v = v + x_rng.normal(0.0, noise.sigma_x, size=n)

    return Dataset(
        points=to_datapoints(z, v, y),
        theta_true=params.theta,
        noise=noise,
        contact_fraction=contact_fraction,
        z=z,
        v=v,
        y=y,
    )


def sample_datapoints(
    params: ModelParams,
    bounds: DomainBounds,
    n: int,
    rng: np.random.Generator,
    mode: str = "uniform",
    noise_scale: float = 0.05,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(z, v, y) arrays with states uniform over the domain box.

    Modes:
        on_graph: y = f(x)
        near_graph: y = f(x) + N(0, noise_scale)
        uniform: y uniform in [-v_max, v_max]
        mixed: each point picks one of the three above with equal probability
    """
    if mode not in SAMPLE_MODES:
        raise ValueError(f"Unknown sample mode {mode!r}; expected one of {SAMPLE_MODES}")
    z, v = _uniform_states(bounds, n, rng)
    f = explicit_velocity_array(params, z, v)
    near = f + rng.normal(0.0, noise_scale, size=n)
    far = rng.uniform(-bounds.v_max, bounds.v_max, size=n)

    if mode == "on_graph":
        y = f
    elif mode == "near_graph":
        y = near
    elif mode == "uniform":
        y = far
    else:
        choice = rng.integers(0, 3, size=n)
        y = np.select([choice == 0, choice == 1], [f, near], default=far)
    return z, v, y
