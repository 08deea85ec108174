"""Unit tests for core/bounds/generalization.py."""

import math

import pytest

from implicit_bounds.core.bounds.generalization import (
    BoundInputs,
    approach_inputs,
    bound_curve,
    dt_scaling,
    generalization_bound,
)
from implicit_bounds.core.losses.losses import Epsilon


def unit_inputs(**overrides) -> BoundInputs:
    values = dict(delta=0.05, n=100, k=1, b_theta=1.0, L_loss_theta=1.0, B_loss=1.0)
    values.update(overrides)
    return BoundInputs(**values)


class TestGeneralizationBound:
    """Test suite for generalization_bound."""

    def test_unit_constants(self):
        expected = 44.0 * math.sqrt(1 / 100) + math.sqrt(math.log(20.0) / 200)
        assert generalization_bound(unit_inputs()) == pytest.approx(expected, rel=1e-12)

    def test_delta_one_drops_confidence_term(self):
        assert generalization_bound(unit_inputs(delta=1.0, n=400, k=4)) == pytest.approx(44.0 * math.sqrt(4 / 400))

    def test_decreasing_in_n(self):
        values = [generalization_bound(unit_inputs(n=n)) for n in (1, 10, 100, 10_000)]
        assert values == sorted(values, reverse=True)

    def test_decreasing_in_delta(self):
        values = [generalization_bound(unit_inputs(delta=d)) for d in (0.001, 0.01, 0.1, 1.0)]
        assert values == sorted(values, reverse=True)

    @pytest.mark.parametrize(
        "overrides, field",
        [
            ({"delta": 0.0}, "delta"),
            ({"delta": 1.5}, "delta"),
            ({"n": 0}, "n"),
            ({"k": 0}, "k"),
            ({"b_theta": -1.0}, "b_theta"),
            ({"L_loss_theta": math.inf}, "L_loss_theta"),
            ({"B_loss": math.nan}, "B_loss"),
        ],
    )
    def test_invalid_inputs(self, overrides, field):
        with pytest.raises(ValueError, match=field):
            unit_inputs(**overrides)


class TestApproachInputs:
    def test_prediction_approaches_share_a_bound(self, params, bounds, eps):
        inputs = approach_inputs(params, bounds, eps)
        assert generalization_bound(inputs["exp"]) == generalization_bound(inputs["nimp"])

    def test_violation_bound_is_tighter(self, params, bounds, eps):
        inputs = approach_inputs(params, bounds, eps, n=1000, delta=0.05)
        assert generalization_bound(inputs["vimp"]) * 50 < generalization_bound(inputs["exp"])
        assert inputs["vimp"].b_theta == bounds.b_theta


class TestBoundCurve:
    """Test suite for bound_curve."""

    def test_curve_over_n(self, params, bounds, eps):
        inputs = approach_inputs(params, bounds, eps)
        frame = bound_curve([10, 100, 1000], inputs, over="n")
        assert list(frame.columns) == ["n", "exp", "nimp", "vimp"]
        assert frame["vimp"].is_monotonic_decreasing
        assert frame["vimp"].iloc[2] == pytest.approx(generalization_bound(inputs["vimp"].with_n(1000)))

    def test_curve_over_delta(self, params, bounds, eps):
        frame = bound_curve([0.01, 0.05, 0.5], approach_inputs(params, bounds, eps), over="delta")
        assert list(frame.columns) == ["delta", "exp", "nimp", "vimp"]
        assert frame["exp"].is_monotonic_decreasing

    def test_empty_sweep(self, params, bounds, eps):
        with pytest.raises(ValueError, match="empty"):
            bound_curve([], approach_inputs(params, bounds, eps))

    def test_unknown_axis(self, params, bounds, eps):
        with pytest.raises(ValueError, match="over"):
            bound_curve([1], approach_inputs(params, bounds, eps), over="k")


class TestDtScaling:
    """Shrinking the time step blows up the explicit constant but not the violation one."""

    def test_explicit_constant_scales_with_inverse_dt(self, params, bounds, eps):
        frame = dt_scaling(params, bounds, eps)
        assert list(frame["dt"]) == [0.05, 0.005, 0.0005, 0.00005]
        assert frame["L_exp_theta"].is_monotonic_increasing
        scaled = frame["L_exp_theta_times_dt"]
        assert scaled.iloc[-1] == pytest.approx(scaled.iloc[-2], rel=1e-3)

    def test_violation_constant_stays_bounded(self, params, bounds, eps):
        frame = dt_scaling(params, bounds, eps)
        assert frame["L_vimp_theta"].max() <= 1.1 * frame["L_vimp_theta"].min()
        assert frame["lambda_max"].is_monotonic_decreasing

    def test_custom_steps(self, params, bounds):
        frame = dt_scaling(params, bounds, Epsilon(0.5), dts=[0.01])
        assert frame["lambda_max"].iloc[0] == pytest.approx(15.0981)
