"""Full-batch subgradient descent on theta for any of the three losses."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..dynamics.contact_model import DomainBounds, ModelParams
from ..losses.landscape import mean_loss
from ..losses.losses import Epsilon, evaluate_losses
from .dataset import Dataset, spawn_rngs


@dataclass(frozen=True)
class TrainerConfig:
    """Trainer settings.

    The step is normalized (theta moves by step_size along the sign of the
    subgradient). theta0 = None draws the initial value uniformly from
    theta_true +- init_radius with init_seed.
    """

    step_size: float = 1e-3
    iterations: int = 50_000
    fd_step: float = 1e-5
    patience: int = 50
    theta0: Optional[float] = None
    init_radius: float = 1.0
    init_seed: int = 0

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not self.fd_step > 0:
            raise ValueError(f"fd_step must be > 0, got {self.fd_step}")
        if self.patience < 2:
            raise ValueError(f"patience must be >= 2, got {self.patience}")


@dataclass
class TrainResult:
    theta_hat: float
    loss_curve: List[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    diverged: bool = False
    theta_curve: List[float] = field(default_factory=list)


def subgradient(
    params: ModelParams,
    z,
    v,
    y,
    kind: str,
    eps: Optional[Epsilon],
    h: float,
    impulse_bound: Optional[float] = None,
) -> float:
    """Branch-aware finite-difference subgradient of the mean loss at params.theta.

    Returns 0 when 0 lies between the one-sided slopes (a kink at a minimum).
    At a local maximum the steeper descent side wins. Otherwise the central
    difference is used if no datapoint changes branch across [theta - h, theta + h],
    and the one-sided slope of smaller magnitude if some do.
    """
    theta = params.theta
    here = evaluate_losses(params, z, v, y, kind, eps, impulse_bound)
    up = evaluate_losses(params.with_theta(theta + h), z, v, y, kind, eps, impulse_bound)
    down = evaluate_losses(params.with_theta(theta - h), z, v, y, kind, eps, impulse_bound)
    L0, Lp, Lm = float(np.mean(here.value)), float(np.mean(up.value)), float(np.mean(down.value))

    g_plus = (Lp - L0) / h
    g_minus = (L0 - Lm) / h
    if g_minus <= 0.0 <= g_plus:
        return 0.0
    if g_minus > 0.0 > g_plus:
        return g_plus if abs(g_plus) >= abs(g_minus) else g_minus
    if np.array_equal(up.branch_code, down.branch_code):
        return (Lp - Lm) / (2.0 * h)
    return g_plus if abs(g_plus) <= abs(g_minus) else g_minus


def train(
    params: ModelParams,
    dataset: Dataset,
    kind: str,
    eps: Optional[Epsilon] = None,
    config: TrainerConfig = TrainerConfig(),
    bounds: Optional[DomainBounds] = None,
) -> TrainResult:
    """Learn theta by normalized subgradient descent on the mean training loss.

    params.theta is ignored; training starts from config.theta0 (or a seeded
    draw around dataset.theta_true) and projects onto [-b_theta, b_theta] after
    every step. Stops early once theta oscillates within two steps over a
    patience window, the subgradient vanishes, or the loss rose across a
    whole patience window (reported as diverged). The inner impulse ranges over
    [-b_lambda, b_lambda] of bounds, or of the default domain when bounds is None.

    Raises:
        ValueError: empty dataset
    """
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    b_theta = bounds.b_theta if bounds is not None else np.inf
    impulse_bound = bounds.b_lambda if bounds is not None else None

    if config.theta0 is None:
        (rng,) = spawn_rngs(config.init_seed, 1)
        theta = dataset.theta_true + rng.uniform(-config.init_radius, config.init_radius)
    else:
        theta = float(config.theta0)
    theta = float(np.clip(theta, -b_theta, b_theta))

    z, v, y = dataset.arrays()
    result = TrainResult(theta_hat=theta)
    window = config.patience
    for it in range(config.iterations):
        at = params.with_theta(theta)
        result.loss_curve.append(mean_loss(at, z, v, y, kind, eps, impulse_bound))
        result.theta_curve.append(theta)
        result.iterations = it + 1

        if len(result.theta_curve) > window:
            recent = result.theta_curve[-window:]
            if max(recent) - min(recent) <= 2.0 * config.step_size:
                result.converged = True
                break
            losses = np.array(result.loss_curve[-window - 1:])
            if np.all(np.diff(losses) > 0):
                result.diverged = True
                break

        g = subgradient(at, z, v, y, kind, eps, config.fd_step, impulse_bound)
        if g == 0.0:
            result.converged = True
            break
        theta = float(np.clip(theta - config.step_size * np.sign(g), -b_theta, b_theta))

    result.theta_hat = theta
    return result
