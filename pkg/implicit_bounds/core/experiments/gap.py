"""Empirical generalization gap of violation-trained models against the bound."""

from dataclasses import replace
from typing import Optional, Sequence

import pandas as pd

from ..bounds.generalization import approach_inputs, generalization_bound
from ..dynamics.contact_model import DomainBounds, ModelParams
from ..losses.landscape import mean_loss
from ..losses.losses import LOSS_VIOLATION, Epsilon
from .dataset import NoiseConfig, generate_dataset
from .trainer import TrainerConfig, train

HOLDOUT_SEED_OFFSET = 1_000_003


def generalization_gap(
    params: ModelParams,
    bounds: DomainBounds,
    eps: Epsilon,
    seeds: Sequence[int],
    n_values: Sequence[int] = (100, 1000),
    noise: Optional[NoiseConfig] = None,
    contact_bias: float = 0.5,
    trainer: TrainerConfig = TrainerConfig(),
    holdout: int = 100_000,
    delta: float = 0.05,
) -> pd.DataFrame:
    """Train on n points per seed, compare train and held-out mean violation loss.

    The held-out set comes from the same generator with a different seed and
    stands in for the population risk. The bound is evaluated at (n, delta).
    noise defaults to sigma_x = sigma_y = 0.01; only its sigmas are used, the
    seed is replaced per dataset.

    Returns:
        DataFrame with one row per (seed, n): theta_hat, train_loss,
        holdout_loss, gap, bound, within_bound
    """
    if noise is None:
        noise = NoiseConfig(sigma_x=0.01, sigma_y=0.01)
    rows = []
    for seed in seeds:
        held = generate_dataset(
            params, bounds, holdout, replace(noise, seed=seed + HOLDOUT_SEED_OFFSET), contact_bias
        )
        for n in n_values:
            data = generate_dataset(params, bounds, n, replace(noise, seed=seed), contact_bias)
            fit = train(params, data, LOSS_VIOLATION, eps, replace(trainer, init_seed=seed), bounds)
            at = params.with_theta(fit.theta_hat)
            train_loss = mean_loss(at, *data.arrays(), LOSS_VIOLATION, eps, bounds.b_lambda)
            holdout_loss = mean_loss(at, *held.arrays(), LOSS_VIOLATION, eps, bounds.b_lambda)
            bound = generalization_bound(approach_inputs(params, bounds, eps, n=n, delta=delta)[LOSS_VIOLATION])
            gap = abs(holdout_loss - train_loss)
            rows.append(
                {
                    "seed": seed,
                    "n": n,
                    "theta_hat": fit.theta_hat,
                    "converged": fit.converged,
                    "train_loss": train_loss,
                    "holdout_loss": holdout_loss,
                    "gap": gap,
                    "bound": bound,
                    "within_bound": gap <= bound,
                }
            )
    return pd.DataFrame(rows)
