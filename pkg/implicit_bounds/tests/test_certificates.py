"""Unit tests for core/graph/certificates.py."""

import math

import numpy as np
import pytest

from implicit_bounds.core.dynamics.contact_model import DomainBounds, ModelParams
from implicit_bounds.core.experiments.dataset import sample_datapoints, spawn_rngs
from implicit_bounds.core.graph.certificates import (
    QGCertificate,
    epsilon_select,
    epsilon_tradeoff,
    graph_vs_prediction,
    lipschitz_f_x,
    qg_modulus,
    qg_verify,
    sandwich_check,
    sandwich_sweep,
    zero_set_check,
)
from implicit_bounds.core.losses.losses import Datapoint, Epsilon


class TestModulus:
    """Closed-form constants of the certificates."""

    @pytest.mark.parametrize("value, mu", [(0.25, 1.0), (0.5, 0.5), (10.0, 0.025)])
    def test_qg_modulus(self, params, value, mu):
        assert qg_modulus(params, Epsilon(value)) == pytest.approx(mu, rel=1e-12)

    def test_epsilon_select(self, params):
        assert epsilon_select(params).value == 0.25
        assert epsilon_select(ModelParams(m=0.5)).value == 0.125
        assert qg_modulus(params, epsilon_select(params)) == pytest.approx(1.0)

    def test_lipschitz_f_x(self, params):
        assert lipschitz_f_x(params) == pytest.approx(math.sqrt(200.0 ** 2 + 1.0))


class TestSandwich:
    """l_exp >= d^2 >= l_exp / (1 + L_f_x^2)."""

    def test_single_point(self, params, bounds):
        report = sandwich_check(params, Datapoint.of(0.01, -5.0, 2.0), bounds)
        assert report.passed
        assert report.failed_side == ""
        assert report.d2 <= report.l_exp
        assert report.d2 >= report.lower

    def test_too_small_lipschitz_constant_breaks_lower_side(self, params, bounds):
        """Stiff contact points sit much closer to the graph than their prediction error."""
        report = sandwich_check(params, Datapoint.of(0.0, 0.0, 1.0), bounds, L_f_x=0.0)
        assert not report.passed
        assert report.failed_side == "lower"

    def test_sweep_has_no_failures(self, params, bounds):
        failures = sandwich_sweep(params, bounds, samples=600, seed=2)
        assert failures.empty
        assert list(failures.columns) == ["z", "v", "y", "l_exp", "d2", "lower", "failed_side"]

    def test_graph_vs_prediction(self, params, bounds):
        (rng,) = spawn_rngs(1, 1)
        z, v, y = sample_datapoints(params, bounds, 200, rng, "mixed")
        frame = graph_vs_prediction(params, z, v, y, bounds)
        assert list(frame.columns) == ["z", "v", "y", "l_exp", "d2", "ratio"]
        assert (frame["ratio"] <= 1.0 + 1e-9).all()
        assert (frame["ratio"] >= 0.0).all()

    def test_contact_points_are_closer_than_predicted(self, params, bounds):
        frame = graph_vs_prediction(params, [0.0], [0.0], [1.0], bounds)
        assert frame["ratio"].iloc[0] < 0.01

    @pytest.mark.slow
    def test_ten_thousand_samples(self, params, bounds):
        assert sandwich_sweep(params, bounds, samples=10_000, seed=0).empty


class TestZeroSet:
    def test_zero_on_graph_positive_off_graph(self, params, bounds, eps):
        report = zero_set_check(params, bounds, eps, samples=2000, seed=5)
        assert report.passed
        assert report.on_graph_samples == 1000
        assert report.on_graph_max_loss <= 1e-12
        assert report.far_samples > 0
        assert report.far_min_loss > 0

    def test_rejects_zero_samples(self, params, bounds, eps):
        with pytest.raises(ValueError, match="samples"):
            zero_set_check(params, bounds, eps, samples=0)

    @pytest.mark.slow
    def test_hundred_thousand_samples(self, params, bounds, eps):
        report = zero_set_check(params, bounds, eps, samples=100_000, seed=0)
        assert report.passed
        assert report.violations == []


class TestQGVerify:
    """Test suite for qg_verify."""

    @pytest.mark.parametrize("value", [0.25, 0.5, 2.0])
    def test_certificate_passes(self, params, bounds, value):
        certificate = qg_verify(params, bounds, Epsilon(value), samples=1000, seed=3)
        assert certificate.passed
        assert certificate.worst_ratio <= 1.0
        assert certificate.expectation_holds
        assert certificate.inconclusive == 0

    def test_certificate_is_not_vacuous(self, params, bounds, eps):
        """Free-fall misses reach (mu/2) d^2 / l_vimp = 0.375, so the worst ratio is well above 0."""
        certificate = qg_verify(params, bounds, eps, samples=1000, seed=3)
        assert certificate.worst_ratio > 0.1
        assert not certificate.violations

    def test_failed_certificate(self, eps):
        certificate = QGCertificate(mu=1.0, eps=eps, samples=1, worst_ratio=1.5, violations=[{"ratio": 1.5}])
        assert not certificate.passed
        assert int(certificate.to_frame()["violations"].iloc[0]) == 1

    def test_frame(self, params, bounds, eps):
        frame = qg_verify(params, bounds, eps, samples=200, seed=1).to_frame()
        assert frame["samples"].iloc[0] == 200
        assert frame["mu"].iloc[0] == pytest.approx(1.0)
        assert bool(frame["passed"].iloc[0])

    def test_seeded(self, params, bounds, eps):
        first = qg_verify(params, bounds, eps, samples=300, seed=11)
        second = qg_verify(params, bounds, eps, samples=300, seed=11)
        assert first.worst_ratio == second.worst_ratio
        assert first.mean_d2 == second.mean_d2

    def test_large_time_step_rejected(self, eps):
        coarse = ModelParams(dt=0.75)
        bounds = DomainBounds.from_params(coarse)
        with pytest.raises(ValueError, match="dt"):
            qg_verify(coarse, bounds, eps, samples=10)

    def test_rejects_zero_samples(self, params, bounds, eps):
        with pytest.raises(ValueError, match="samples"):
            qg_verify(params, bounds, eps, samples=0)

    @pytest.mark.slow
    def test_hundred_thousand_samples(self, params, bounds, eps):
        certificate = qg_verify(params, bounds, eps, samples=100_000, seed=0)
        assert certificate.passed
        assert certificate.samples == 100_000


class TestEpsilonTradeoff:
    def test_fidelity_against_generalization(self, params, bounds):
        frame = epsilon_tradeoff(params, bounds, [0.05, 0.25, 1.0, 4.0])
        assert list(frame.columns) == ["eps", "mu", "L_vimp_theta", "B_vimp", "bound_vimp"]
        assert frame["mu"].is_monotonic_decreasing
        assert frame["L_vimp_theta"].is_monotonic_decreasing
        assert frame["bound_vimp"].is_monotonic_decreasing
        assert np.isclose(frame["mu"].iloc[1], 1.0)

    def test_invalid_eps(self, params, bounds):
        with pytest.raises(ValueError):
            epsilon_tradeoff(params, bounds, [0.0])
