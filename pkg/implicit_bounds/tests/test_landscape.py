"""Unit tests for core/losses/landscape.py."""

import numpy as np
import pytest

from implicit_bounds.core.errors import InnerSolverError
from implicit_bounds.core.losses.landscape import datapoints_to_arrays, loss_landscape, mean_loss
from implicit_bounds.core.losses.losses import LOSS_KINDS, Datapoint, Epsilon

THETAS = [-0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5]


class TestLossLandscape:
    """Test suite for loss_landscape."""

    @pytest.mark.parametrize("kind", LOSS_KINDS)
    def test_minimum_at_generating_height(self, params, eps, noiseless_dataset, kind):
        """On noiseless data every loss vanishes at theta_true = 0 and nowhere else on the grid."""
        frame = loss_landscape(params, THETAS, noiseless_dataset.points, kind, eps)
        assert list(frame.columns) == ["theta", "mean_loss"]
        assert list(frame["theta"]) == THETAS
        assert frame["mean_loss"].iloc[3] == pytest.approx(0.0, abs=1e-12)
        assert int(frame["mean_loss"].idxmin()) == 3
        assert (frame["mean_loss"].drop(index=3) > 1e-6).all()

    def test_explicit_and_naive_landscapes_coincide(self, params, noiseless_dataset):
        """Both prediction losses pick the same next velocity, so their landscapes agree pointwise."""
        thetas = np.linspace(-0.5, 0.5, 41)
        explicit = loss_landscape(params, thetas, noiseless_dataset.points, "exp")
        naive = loss_landscape(params, thetas, noiseless_dataset.points, "nimp")
        assert np.max(np.abs(explicit["mean_loss"] - naive["mean_loss"])) <= 1e-10

    def test_larger_eps_lowers_the_violation_landscape(self, params, noiseless_dataset):
        small = loss_landscape(params, THETAS, noiseless_dataset.points, "vimp", Epsilon(0.25))
        large = loss_landscape(params, THETAS, noiseless_dataset.points, "vimp", Epsilon(2.0))
        assert (large["mean_loss"] <= small["mean_loss"] + 1e-12).all()

    def test_empty_grid(self, params, noiseless_dataset):
        with pytest.raises(ValueError, match="grid"):
            loss_landscape(params, [], noiseless_dataset.points, "exp")

    def test_empty_data(self, params):
        with pytest.raises(ValueError, match="dataset"):
            loss_landscape(params, THETAS, [], "exp")

    def test_unknown_kind(self, params, noiseless_dataset):
        with pytest.raises(ValueError, match="Unknown loss kind"):
            loss_landscape(params, THETAS, noiseless_dataset.points, "hinge")

    def test_nonfinite_loss_names_theta(self, params):
        data = [Datapoint.of(1.0, 0.0, np.inf)]
        with pytest.raises(InnerSolverError) as info:
            loss_landscape(params, [0.25, 0.5], data, "exp")
        assert info.value.theta == 0.25
        assert "theta=0.25" in str(info.value)


class TestMeanLoss:
    def test_matches_scalar_average(self, params, noiseless_dataset):
        z, v, y = noiseless_dataset.arrays()
        at = params.with_theta(0.2)
        expected = np.mean([(yi - (vi - 0.04905 + max(0.0, -vi + 0.04905 + (0.2 - zi) / 0.005))) ** 2 for zi, vi, yi in zip(z, v, y)])
        assert mean_loss(at, z, v, y, "exp") == pytest.approx(expected, rel=1e-9)

    def test_datapoints_to_arrays(self):
        z, v, y = datapoints_to_arrays([Datapoint.of(1.0, 2.0, 3.0), Datapoint.of(4.0, 5.0, 6.0)])
        assert z.tolist() == [1.0, 4.0]
        assert v.tolist() == [2.0, 5.0]
        assert y.tolist() == [3.0, 6.0]
