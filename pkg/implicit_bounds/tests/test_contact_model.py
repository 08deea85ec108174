"""Unit tests for core/dynamics/contact_model.py."""

import math

import numpy as np
import pytest

from implicit_bounds.core.dynamics.contact_model import (
    REGION_NEG_LAMBDA_NEG_PHI,
    REGION_NEG_LAMBDA_POS_PHI,
    REGION_POS_LAMBDA_NEG_PHI,
    REGION_POS_LAMBDA_POS_PHI,
    DomainBounds,
    GapPair,
    ModelParams,
    NextVelocity,
    State,
    contact_impulse,
    contact_impulse_array,
    end_gap_array,
    explicit_velocity_array,
    g_eval,
    h_eval,
    h_partials,
    region_label,
    simulate_trajectory,
    step_explicit,
)


class TestModelParams:
    """Test suite for ModelParams and DomainBounds construction."""

    @pytest.mark.parametrize("field", ["m", "dt", "a_grav"])
    def test_nonpositive_constants_rejected(self, field):
        """Mass, time step and gravity must be positive."""
        with pytest.raises(ValueError, match=field):
            ModelParams(**{field: 0.0})

    def test_nonfinite_theta_rejected(self):
        with pytest.raises(ValueError, match="theta"):
            ModelParams(theta=math.inf)

    def test_with_theta_keeps_other_constants(self, params):
        moved = params.with_theta(0.3)
        assert moved.theta == 0.3
        assert (moved.m, moved.dt, moved.a_grav) == (params.m, params.dt, params.a_grav)

    def test_default_lambda_max(self, bounds):
        """lambda_max = m (v_max + a_grav dt)."""
        assert bounds.lambda_max == pytest.approx(15.04905, rel=1e-12)
        assert bounds.b_lambda == pytest.approx(1635.04905, rel=1e-12)

    def test_b_lambda_covers_every_contact_impulse(self, params, bounds):
        """The LCP impulse stays inside [-b_lambda, b_lambda] over the state and parameter boxes."""
        rng = np.random.default_rng(0)
        z = rng.uniform(bounds.z_lo, bounds.z_hi, size=20_000)
        v = rng.uniform(-bounds.v_max, bounds.v_max, size=20_000)
        theta = rng.uniform(-bounds.b_theta, bounds.b_theta, size=20_000)
        # the impulse depends on theta - z only
        impulses = contact_impulse_array(params, z - theta, v)
        assert impulses.max() <= bounds.b_lambda
        worst = contact_impulse(params.with_theta(bounds.b_theta), State(bounds.z_lo, -bounds.v_max))
        assert worst == pytest.approx(bounds.b_lambda, rel=1e-12)

    def test_b_lambda_at_true_ground_penetration(self, params, bounds):
        """Pushing the deepest admissible state back out needs m (v_max + a_grav dt + penetration / dt)."""
        deepest = contact_impulse(params, State(bounds.z_lo, -bounds.v_max))
        assert deepest == pytest.approx(35.04905, rel=1e-12)
        assert deepest <= bounds.b_lambda

    def test_explicit_b_lambda_kept(self, params):
        assert DomainBounds.from_params(params, b_lambda=20.0).b_lambda == 20.0

    def test_lambda_max_heavier_mass(self):
        bounds = DomainBounds.from_params(ModelParams(m=2.0, dt=0.01), v_max=15.0)
        assert bounds.lambda_max == pytest.approx(30.1962, rel=1e-12)

    def test_b_lambda_below_lambda_max_rejected(self, params):
        with pytest.raises(ValueError, match="b_lambda"):
            DomainBounds.from_params(params, b_lambda=1.0)

    def test_search_box_encloses_domain(self, bounds):
        z_lo, z_hi, v_lo, v_hi = bounds.search_box(0.2)
        assert z_lo < bounds.z_lo and z_hi > bounds.z_hi
        assert v_lo < -bounds.v_max and v_hi > bounds.v_max


class TestExplicitStep:
    """Test suite for step_explicit, g_eval and h_eval."""

    def test_resting_contact(self, params):
        """Contact term exactly cancels free fall."""
        assert step_explicit(params, State(0.0, 0.0)).v_next == 0.0

    def test_free_fall(self, params):
        assert step_explicit(params, State(1.0, 0.0)).v_next == pytest.approx(-0.04905, abs=1e-12)

    def test_impact(self, params):
        """Fast approach: the step ends exactly on the ground."""
        assert step_explicit(params, State(0.05, -15.0)).v_next == pytest.approx(-10.0, abs=1e-9)

    def test_contact_impulse_on_impact(self, params):
        assert contact_impulse(params, State(0.05, -15.0)) == pytest.approx(5.04905, abs=1e-9)

    def test_contact_impulse_zero_in_free_fall(self, params):
        assert contact_impulse(params, State(1.0, 0.0)) == 0.0

    def test_g_zero_impulse_is_free_fall(self, params):
        assert g_eval(params, State(1.0, 0.0), 0.0).v_next == pytest.approx(-0.04905)

    def test_g_unit_impulse(self, params):
        assert g_eval(params, State(1.0, 0.0), 1.0).v_next == pytest.approx(0.95095)

    def test_g_ignores_height(self):
        heavy = ModelParams(m=2.0)
        for z in (-3.0, 0.0, 7.5):
            assert g_eval(heavy, State(z, 5.0), -1.0).v_next == pytest.approx(4.45095)

    def test_h_complementary_pair(self, params):
        assert h_eval(params, State(0.0, 0.0), NextVelocity(0.0), 0.5) == 0.0

    def test_h_penetration(self, params):
        assert h_eval(params, State(0.0, 0.0), NextVelocity(-1.0), 0.0) == pytest.approx(1.25e-5)

    def test_h_pulling_impulse(self, params):
        assert h_eval(params, State(0.0, 0.0), NextVelocity(0.0), -2.0) == pytest.approx(2.0)


class TestExplicitStepProperties:
    """Sampled properties of the explicit map over the domain box."""

    def test_no_penetration_at_end_of_step(self, params, bounds):
        rng = np.random.default_rng(1)
        for theta in (-0.5, 0.0, 0.3):
            at = params.with_theta(theta)
            z = theta + rng.uniform(bounds.z_lo, bounds.z_hi, size=50_000)  # bounds sit around theta = 0
            v = rng.uniform(-bounds.v_max, bounds.v_max, size=50_000)
            gap = end_gap_array(at, z, explicit_velocity_array(at, z, v))
            assert gap.min() >= -1e-12

    def test_theta_slope_bounded_by_inverse_dt(self, params, bounds):
        """One-sided differences of f in theta never exceed 1 / dt."""
        rng = np.random.default_rng(2)
        z = rng.uniform(bounds.z_lo, bounds.z_hi, size=200)
        v = rng.uniform(-bounds.v_max, bounds.v_max, size=200)
        step = 1e-6
        for theta in np.linspace(-0.5, 0.5, 101):
            here = explicit_velocity_array(params.with_theta(theta), z, v)
            up = explicit_velocity_array(params.with_theta(theta + step), z, v)
            down = explicit_velocity_array(params.with_theta(theta - step), z, v)
            assert np.max(np.abs(up - here)) / step <= 1.0 / params.dt + 1e-6
            assert np.max(np.abs(here - down)) / step <= 1.0 / params.dt + 1e-6


class TestRegions:
    """Region labels and the per-region partial derivatives of h."""

    def test_zero_counts_as_nonnegative(self):
        assert region_label(0.0, 0.0) == REGION_POS_LAMBDA_POS_PHI
        assert region_label(-1.0, 0.0) == REGION_NEG_LAMBDA_POS_PHI
        assert region_label(0.0, -1.0) == REGION_POS_LAMBDA_NEG_PHI
        assert region_label(-1.0, -1.0) == REGION_NEG_LAMBDA_NEG_PHI

    def test_gap_pair_from_step(self, params):
        pair = GapPair.from_step(params, State(0.0, 0.0), NextVelocity(-1.0), 2.0)
        assert pair.phi == pytest.approx(-0.005)
        assert pair.region == REGION_POS_LAMBDA_NEG_PHI

    @pytest.mark.parametrize(
        "z, y, impulse",
        [
            (-0.5, 0.0, -1.5),  # lambda<0, phi<0
            (0.5, 0.0, -1.5),  # lambda<0, phi>=0
            (-0.5, 0.0, 2.0),  # lambda>=0, phi<0
            (0.5, 0.0, 2.0),  # lambda>=0, phi>=0
        ],
    )
    def test_partials_match_central_differences(self, params, z, y, impulse):
        """Closed-form partials agree with central differences inside each region."""
        x, out = State(z, 0.0), NextVelocity(y)
        step = 1e-6
        partials = h_partials(params, x, out, impulse)

        dh_dlambda = (h_eval(params, x, out, impulse + step) - h_eval(params, x, out, impulse - step)) / (2 * step)
        up = h_eval(params.with_theta(params.theta + step), x, out, impulse)
        down = h_eval(params.with_theta(params.theta - step), x, out, impulse)
        dh_dtheta = (up - down) / (2 * step)

        assert partials.dh_dlambda == pytest.approx(dh_dlambda, abs=1e-6)
        assert partials.dh_dtheta == pytest.approx(dh_dtheta, abs=1e-6)
        assert partials.region == region_label(impulse, z + y * params.dt - params.theta)


class TestSimulateTrajectory:
    """Test suite for simulate_trajectory."""

    def test_rest_is_fixed_point(self, params):
        trajectory = simulate_trajectory(params, State(0.0, 0.0), 25)
        assert len(trajectory) == 26
        assert all(state == State(0.0, 0.0) for state in trajectory)

    def test_single_free_fall_step(self, params):
        first, second = simulate_trajectory(params, State(1.0, 0.0), 1)
        assert first == State(1.0, 0.0)
        assert second.z == pytest.approx(0.99975475, abs=1e-12)
        assert second.v == pytest.approx(-0.04905, abs=1e-12)

    def test_impact_lands_then_stops(self, params):
        _, landed, settled = simulate_trajectory(params, State(0.05, -15.0), 2)
        assert landed.z == pytest.approx(0.0, abs=1e-12)
        assert settled.v == pytest.approx(0.0, abs=1e-9)

    def test_zero_steps_rejected(self, params):
        with pytest.raises(ValueError, match="steps"):
            simulate_trajectory(params, State(1.0, 0.0), 0)

    def test_nonfinite_start_rejected(self, params):
        with pytest.raises(ValueError, match="finite"):
            simulate_trajectory(params, State(math.nan, 0.0), 3)
