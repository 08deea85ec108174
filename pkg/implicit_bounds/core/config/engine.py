"""Experiment configuration: YAML file -> validated ExperimentConfig -> typed getters.

Values in the YAML file take precedence over the code defaults declared on the
pydantic models. Derived values (lambda_max, b_lambda, epsilon "auto") are
resolved by ConfigEngine before any computation sees them.
"""

import hashlib
import os
from pathlib import Path
from typing import List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..dynamics.contact_model import DomainBounds, ModelParams
from ..errors import ConfigError
from ..experiments.dataset import NoiseConfig
from ..experiments.trainer import TrainerConfig
from ..graph.certificates import epsilon_select
from ..graph.distance import GraphGrid
from ..losses.losses import LOSS_KINDS, Epsilon

OUTPUT_DIR_ENV = "IMPLICIT_BOUNDS_OUTPUT_DIR"
DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / "configs" / "default.yaml"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ModelSection(_Section):
    m: float = Field(1.0, gt=0)
    dt: float = Field(0.005, gt=0)
    a_grav: float = Field(9.81, gt=0)
    theta: float = 0.0


class DomainSection(_Section):
    phi_max: float = Field(8.0, gt=0)
    v_max: float = Field(15.0, gt=0)
    b_theta: float = Field(8.0, gt=0)
    lambda_max: Optional[float] = Field(None, gt=0)
    b_lambda: Optional[float] = Field(None, gt=0)
    penetration: float = Field(0.1, ge=0)


class DatasetSection(_Section):
    n: int = Field(100, ge=1)
    contact_bias: float = Field(0.5, ge=0, le=1)
    sigma_x: float = Field(0.0, ge=0)
    sigma_y: float = Field(0.0, ge=0)
    holdout: int = Field(100_000, ge=1)


class TrainerSection(_Section):
    kind: str = "vimp"
    step_size: float = Field(0.001, gt=0)
    iterations: int = Field(50_000, ge=1)
    fd_step: float = Field(0.00001, gt=0)
    patience: int = Field(50, ge=2)
    theta0: Optional[float] = None
    init_radius: float = Field(1.0, ge=0)

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, value: str) -> str:
        if value not in LOSS_KINDS:
            raise ValueError(f"kind must be one of {LOSS_KINDS}, got {value!r}")
        return value


class SweepsSection(_Section):
    theta_min: float = -0.5
    theta_max: float = 0.5
    theta_points: int = Field(101, ge=1)
    n_values: List[int] = Field(default_factory=lambda: [10, 100, 1000, 10_000, 100_000, 1_000_000])
    delta_values: List[float] = Field(default_factory=lambda: [0.001, 0.01, 0.05, 0.1, 0.5])
    eps_values: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.25, 0.5, 1.0, 2.0])
    dt_values: List[float] = Field(default_factory=lambda: [0.05, 0.005, 0.0005, 0.00005])
    delta: float = Field(0.05, gt=0, le=1)
    k: int = Field(1, ge=1)
    n_reference: int = Field(1000, ge=1)
    gap_seeds: int = Field(20, ge=1)
    gap_n_values: List[int] = Field(default_factory=lambda: [100, 1000])
    gap_sigma_x: float = Field(0.01, ge=0)
    gap_sigma_y: float = Field(0.01, ge=0)


class GraphSection(_Section):
    coarse_points: int = Field(201, ge=3)
    window_points: int = Field(41, ge=3)
    window_cells: int = Field(2, ge=1)
    final_resolution: float = Field(0.000001, gt=0)
    max_rounds: int = Field(8, ge=0)
    enlarge: float = Field(0.2, ge=0)
    samples: int = Field(2000, ge=1)
    sample_mode: Literal["on_graph", "near_graph", "uniform", "mixed"] = "mixed"


class ExperimentConfig(_Section):
    model: ModelSection = Field(default_factory=ModelSection)
    domain: DomainSection = Field(default_factory=DomainSection)
    epsilon: Union[float, Literal["auto"]] = "auto"
    dataset: DatasetSection = Field(default_factory=DatasetSection)
    trainer: TrainerSection = Field(default_factory=TrainerSection)
    sweeps: SweepsSection = Field(default_factory=SweepsSection)
    graph: GraphSection = Field(default_factory=GraphSection)
    output_dir: Optional[str] = None
    seed: int = 0

    @field_validator("epsilon")
    @classmethod
    def _positive_epsilon(cls, value):
        if value != "auto" and not value > 0:
            raise ValueError(f"epsilon must be > 0 or 'auto', got {value!r}")
        return value


def parse_config(text: str) -> ExperimentConfig:
    """Parse YAML text into an ExperimentConfig.

    Raises:
        ConfigError: YAML syntax error or schema violation
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"Config is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"Config must be a mapping at the top level, got {type(raw).__name__}")
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"Config failed validation: {exc}") from exc


def dump_config(config: ExperimentConfig) -> str:
    """Serialize to YAML; parse_config(dump_config(c)) == c."""
    return yaml.safe_dump(config.model_dump(mode="json"), sort_keys=False)


def config_hash(config: ExperimentConfig) -> str:
    """First 16 hex chars of the sha256 of the canonical dump."""
    canonical = yaml.safe_dump(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


class ConfigEngine:
    """Loads an experiment config file and hands out typed domain objects.

    Mirrors the way run settings are kept out of code: the YAML file is the
    single source, the getters turn it into ModelParams, DomainBounds, Epsilon
    and friends.
    """

    def __init__(self, path: Optional[Union[str, Path]] = None, config: Optional[ExperimentConfig] = None):
        """Initialize from a file path, an in-memory config, or the packaged default.

        Args:
            path: YAML config path; ignored when config is given
            config: already-validated config

        Raises:
            FileNotFoundError: path does not exist (message names the path)
            ConfigError: file content is invalid
        """
        if config is not None:
            self.path = None
            self.config = config
        else:
            self.path = Path(path) if path is not None else DEFAULT_CONFIG
            self.config = self._load_config()

    def _load_config(self) -> ExperimentConfig:
        if not self.path.exists():
            raise FileNotFoundError(f"Experiment config not found: {self.path}")
        with open(self.path, "r", encoding="utf-8") as f:
            return parse_config(f.read())

    @property
    def hash(self) -> str:
        return config_hash(self.config)

    @property
    def seed(self) -> int:
        return self.config.seed

    def get_model_params(self) -> ModelParams:
        return ModelParams(**self.config.model.model_dump())

    def get_domain_bounds(self) -> DomainBounds:
        domain = self.config.domain
        try:
            return DomainBounds.from_params(
                self.get_model_params(),
                phi_max=domain.phi_max,
                v_max=domain.v_max,
                b_theta=domain.b_theta,
                lambda_max=domain.lambda_max,
                b_lambda=domain.b_lambda,
                penetration=domain.penetration,
            )
        except ValueError as exc:
            raise ConfigError(f"Invalid domain section: {exc}") from exc

    def get_epsilon(self) -> Epsilon:
        """Configured eps, with "auto" resolved to min(1/4, m^2/2)."""
        if self.config.epsilon == "auto":
            return epsilon_select(self.get_model_params())
        return Epsilon(float(self.config.epsilon))

    def get_graph_grid(self) -> GraphGrid:
        graph = self.config.graph
        return GraphGrid(
            coarse_points=graph.coarse_points,
            window_points=graph.window_points,
            window_cells=graph.window_cells,
            final_resolution=graph.final_resolution,
            max_rounds=graph.max_rounds,
            enlarge=graph.enlarge,
        )

    def get_noise(self, seed: Optional[int] = None) -> NoiseConfig:
        dataset = self.config.dataset
        return NoiseConfig(
            sigma_x=dataset.sigma_x,
            sigma_y=dataset.sigma_y,
            seed=self.config.seed if seed is None else seed,
        )

    def get_gap_noise(self, seed: Optional[int] = None) -> NoiseConfig:
        """Noise of the generalization-gap datasets (sweeps.gap_sigma_x, gap_sigma_y)."""
        sweeps = self.config.sweeps
        return NoiseConfig(
            sigma_x=sweeps.gap_sigma_x,
            sigma_y=sweeps.gap_sigma_y,
            seed=self.config.seed if seed is None else seed,
        )

    def get_trainer_config(self) -> TrainerConfig:
        trainer = self.config.trainer
        return TrainerConfig(
            step_size=trainer.step_size,
            iterations=trainer.iterations,
            fd_step=trainer.fd_step,
            patience=trainer.patience,
            theta0=trainer.theta0,
            init_radius=trainer.init_radius,
            init_seed=self.config.seed,
        )

    def get_theta_grid(self) -> List[float]:
        sweeps = self.config.sweeps
        if sweeps.theta_points == 1:
            return [sweeps.theta_min]
        step = (sweeps.theta_max - sweeps.theta_min) / (sweeps.theta_points - 1)
        return [sweeps.theta_min + i * step for i in range(sweeps.theta_points)]

    def get_output_dir(self, override: Optional[str] = None) -> Path:
        """--out flag, then the config, then $IMPLICIT_BOUNDS_OUTPUT_DIR, then ./runs."""
        for candidate in (override, self.config.output_dir, os.environ.get(OUTPUT_DIR_ENV)):
            if candidate:
                return Path(candidate)
        return Path("runs")
