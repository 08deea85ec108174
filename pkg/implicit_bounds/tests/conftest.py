"""Pytest configuration and shared fixtures."""

from pathlib import Path

import pytest

from implicit_bounds.core.config.engine import ConfigEngine
from implicit_bounds.core.dynamics.contact_model import DomainBounds, ModelParams
from implicit_bounds.core.experiments.dataset import NoiseConfig, generate_dataset
from implicit_bounds.core.losses.losses import Epsilon

SMALL_CONFIG = """\
model:
  m: 1.0
  dt: 0.005
  a_grav: 9.81
  theta: 0.0
domain:
  phi_max: 8.0
  v_max: 15.0
  b_theta: 8.0
epsilon: auto
dataset:
  n: 50
  contact_bias: 0.5
  holdout: 2000
trainer:
  kind: vimp
  iterations: 2000
  theta0: 0.2
sweeps:
  theta_points: 11
  n_values: [10, 100, 1000]
  delta_values: [0.01, 0.05]
  eps_values: [0.25, 0.5]
  dt_values: [0.005, 0.0005]
  gap_seeds: 2
  gap_n_values: [50]
graph:
  samples: 300
seed: 7
"""


@pytest.fixture
def params():
    """Default toy model: m = 1 kg, dt = 5 ms, ground at theta = 0."""
    return ModelParams()


@pytest.fixture
def bounds(params):
    """Default domain around the ground (lambda_max = 15.04905)."""
    return DomainBounds.from_params(params)


@pytest.fixture
def eps():
    return Epsilon(0.25)


@pytest.fixture
def noiseless_dataset(params, bounds):
    """100 realizable points, half of them forced into contact."""
    return generate_dataset(params, bounds, 100, NoiseConfig(seed=3), contact_bias=0.5)


@pytest.fixture
def small_config_file(tmp_path) -> Path:
    """Experiment config with reduced sizes so full sections run quickly."""
    path = tmp_path / "small.yaml"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    return path


@pytest.fixture
def small_engine(small_config_file):
    return ConfigEngine(small_config_file)
