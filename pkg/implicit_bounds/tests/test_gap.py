"""Unit tests for core/experiments/gap.py."""

import pandas as pd
import pytest

from implicit_bounds.core.experiments.dataset import NoiseConfig
from implicit_bounds.core.experiments.gap import generalization_gap
from implicit_bounds.core.experiments.trainer import TrainerConfig

QUICK = dict(seeds=[1], n_values=[30], trainer=TrainerConfig(iterations=300), holdout=500)


class TestGeneralizationGap:
    """Test suite for generalization_gap."""

    def test_default_noise_is_one_centimetre(self, params, bounds, eps):
        default = generalization_gap(params, bounds, eps, **QUICK)
        explicit = generalization_gap(params, bounds, eps, noise=NoiseConfig(sigma_x=0.01, sigma_y=0.01), **QUICK)
        pd.testing.assert_frame_equal(default, explicit)

    def test_noiseless_request_is_respected(self, params, bounds, eps):
        noisy = generalization_gap(params, bounds, eps, **QUICK)
        clean = generalization_gap(params, bounds, eps, noise=NoiseConfig(), **QUICK)
        assert clean["train_loss"].iloc[0] != noisy["train_loss"].iloc[0]

    def test_columns(self, params, bounds, eps):
        frame = generalization_gap(params, bounds, eps, **QUICK)
        assert list(frame.columns) == [
            "seed",
            "n",
            "theta_hat",
            "converged",
            "train_loss",
            "holdout_loss",
            "gap",
            "bound",
            "within_bound",
        ]
        assert frame["gap"].iloc[0] == pytest.approx(abs(frame["holdout_loss"].iloc[0] - frame["train_loss"].iloc[0]))

    @pytest.mark.slow
    def test_twenty_seeds_stay_within_bound(self, params, bounds, eps):
        frame = generalization_gap(params, bounds, eps, seeds=range(20), n_values=(100, 1000))
        assert len(frame) == 40
        assert frame["within_bound"].all()
