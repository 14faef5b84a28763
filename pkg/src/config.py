"""Configuration management for QTRL experiments."""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any

from .exceptions import ValidationError
from .models import Activation, GradientMethod, Mode, OptimizerKind
from .policy import CLASSICAL_TOPOLOGY, QT_TOPOLOGY, PolicyTopology
from .validators import (
    validate_experiment_config,
    validate_preset_shape,
    validate_sync_config,
)

logger = logging.getLogger(__name__)

CENTRIC_MAX_ROUNDS = 5000
DISTRIBUTED_MAX_ROUNDS = 2000

# Learning-rate multiplier per round at or above the target, and its lower bound.
ANNEAL_FACTOR = 0.9
ANNEAL_FLOOR = 1e-3

METRICS_FILE = "metrics.csv"
SPEEDUP_FILE = "speedup.csv"
CHECKPOINT_FILE = "model.ckpt"

# Published figures, printed next to measured values and never asserted.
REFERENCE_SPEEDUPS: dict[int, float] = {2: 2.06, 4: 3.33, 8: 5.33}
REFERENCE_REWARDS: dict[str, float] = {
    "classical": 0.9244,
    "centric-3": 0.6453,
    "centric-7": 0.8164,
    "centric-13": 0.8632,
    "distributed-3x4": 0.901,
}
REFERENCE_SIZES: dict[str, int] = {
    "classical": 4835,
    "centric-3": 1749,
    "centric-7": 2061,
    "centric-13": 2529,
}


@dataclass(frozen=True)
class SyncConfig:
    """Settings of one synchronous training run."""

    num_agents: int = 1
    learning_rate: float = 0.01
    episodes_per_round: int = 1
    max_rounds: int = CENTRIC_MAX_ROUNDS
    target_reward: float = 0.8
    target_window: int = 50
    optimizer: OptimizerKind = OptimizerKind.ADAPTIVE_MOMENT
    gamma: float = 0.99
    normalize_returns: bool = True
    gradient_method: GradientMethod = GradientMethod.ADJOINT
    base_seed: int = 0
    sequential: bool = False
    stop_at_target: bool = True
    keep_trace: bool = False
    log_every: int = 50
    anneal_factor: float = ANNEAL_FACTOR
    anneal_floor: float = ANNEAL_FLOOR

    def __post_init__(self) -> None:
        validate_sync_config(self)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a CLI run needs; flat so it maps one-to-one onto JSON keys."""

    mode: Mode = Mode.QTRL_CENTRIC
    layers: int = 3
    agents: int = 1
    gamma: float = 0.99
    learning_rate: float = 0.01
    normalize_returns: bool = True
    optimizer: OptimizerKind = OptimizerKind.ADAPTIVE_MOMENT
    max_rounds: int | None = None
    target_reward: float = 0.8
    target_window: int = 50
    base_seed: int = 0
    episodes_per_round: int = 1
    gradient_method: GradientMethod = GradientMethod.ADJOINT
    activation: Activation = Activation.TANH
    sequential: bool = False
    log_every: int = 50
    eval_episodes: int = 100
    bench_agents: tuple[int, ...] = (2, 4, 8)
    out_dir: str = "runs"
    keep_trace: bool = False
    stop_at_target: bool = True
    anneal_factor: float = ANNEAL_FACTOR
    anneal_floor: float = ANNEAL_FLOOR

    def __post_init__(self) -> None:
        validate_experiment_config(self)

    @property
    def resolved_max_rounds(self) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        if self.mode is Mode.QTRL_DISTRIBUTED:
            return DISTRIBUTED_MAX_ROUNDS
        return CENTRIC_MAX_ROUNDS

    @property
    def num_agents(self) -> int:
        return self.agents if self.mode is Mode.QTRL_DISTRIBUTED else 1

    @property
    def topology(self) -> PolicyTopology:
        base = CLASSICAL_TOPOLOGY if self.mode is Mode.CLASSICAL_BASELINE else QT_TOPOLOGY
        return replace(base, activation=self.activation)

    @property
    def output_path(self) -> Path:
        return Path(self.out_dir)

    @property
    def metrics_path(self) -> Path:
        return self.output_path / METRICS_FILE

    @property
    def checkpoint_path(self) -> Path:
        return self.output_path / CHECKPOINT_FILE

    @property
    def speedup_path(self) -> Path:
        return self.output_path / SPEEDUP_FILE

    def to_sync_config(self, **overrides: Any) -> SyncConfig:
        settings = {
            "num_agents": self.num_agents,
            "learning_rate": self.learning_rate,
            "episodes_per_round": self.episodes_per_round,
            "max_rounds": self.resolved_max_rounds,
            "target_reward": self.target_reward,
            "target_window": self.target_window,
            "optimizer": self.optimizer,
            "gamma": self.gamma,
            "normalize_returns": self.normalize_returns,
            "gradient_method": self.gradient_method,
            "base_seed": self.base_seed,
            "sequential": self.sequential,
            "keep_trace": self.keep_trace,
            "stop_at_target": self.stop_at_target,
            "log_every": self.log_every,
            "anneal_factor": self.anneal_factor,
            "anneal_floor": self.anneal_floor,
        }
        settings.update(overrides)
        return SyncConfig(**settings)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Enum):
                data[key] = value.value
            elif isinstance(value, tuple):
                data[key] = list(value)
        return data


PRESETS: dict[str, dict[str, Any]] = {
    "classical": {"mode": Mode.CLASSICAL_BASELINE},
    "centric-3": {"mode": Mode.QTRL_CENTRIC, "layers": 3},
    "centric-7": {"mode": Mode.QTRL_CENTRIC, "layers": 7},
    "centric-13": {"mode": Mode.QTRL_CENTRIC, "layers": 13},
    "distributed-3x2": {"mode": Mode.QTRL_DISTRIBUTED, "layers": 3, "agents": 2},
    "distributed-3x4": {"mode": Mode.QTRL_DISTRIBUTED, "layers": 3, "agents": 4},
    "distributed-3x8": {"mode": Mode.QTRL_DISTRIBUTED, "layers": 3, "agents": 8},
}

_ENUM_FIELDS: dict[str, type[Enum]] = {
    "mode": Mode,
    "optimizer": OptimizerKind,
    "gradient_method": GradientMethod,
    "activation": Activation,
}


def _coerce(key: str, value: Any) -> Any:
    if key in _ENUM_FIELDS and not isinstance(value, Enum):
        try:
            return _ENUM_FIELDS[key](value)
        except ValueError as e:
            choices = ", ".join(m.value for m in _ENUM_FIELDS[key])
            raise ValidationError(f"Invalid {key} '{value}'. Choose from: {choices}") from e
    if key == "bench_agents":
        if isinstance(value, str) or not isinstance(value, list | tuple):
            raise ValidationError(
                f"Invalid bench_agents '{value}'. Expected a list of agent counts"
            )
        return tuple(value)
    return value


def preset_name(config: ExperimentConfig) -> str | None:
    """Name of the preset this configuration reproduces, if any."""
    for name, values in PRESETS.items():
        if all(getattr(config, key) == value for key, value in values.items()):
            return name
    return None


def load_config(
    path: str | Path | None = None, preset: str | None = None, **overrides: Any
) -> ExperimentConfig:
    """Build a validated ExperimentConfig.

    Precedence, lowest first: dataclass defaults, the preset, the JSON file,
    then keyword overrides. Overrides whose value is None are ignored.

    Raises:
        ValidationError: On unknown keys, bad values or an unreadable file
    """
    known = {f.name for f in fields(ExperimentConfig)}
    values: dict[str, Any] = {}

    if preset is not None:
        if preset not in PRESETS:
            raise ValidationError(
                f"Unknown preset '{preset}'. Choose from: {', '.join(PRESETS)}"
            )
        values.update(PRESETS[preset])

    if path is not None:
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"Cannot read config file {path}: {e}") from e
        if not isinstance(data, dict):
            raise ValidationError(f"Config file {path} must hold a JSON object")
        values.update(data)

    values.update({k: v for k, v in overrides.items() if v is not None})

    unknown = sorted(set(values) - known)
    if unknown:
        raise ValidationError(f"Unknown config keys: {', '.join(unknown)}")

    config = ExperimentConfig(**{k: _coerce(k, v) for k, v in values.items()})
    if preset is not None:
        validate_preset_shape(config.layers, config.num_agents)
    if config.agents != 1 and config.mode is not Mode.QTRL_DISTRIBUTED:
        logger.warning(
            f"agents={config.agents} ignored for mode {config.mode.value}; "
            f"training with a single agent"
        )
    logger.debug(f"Loaded configuration: {config.to_dict()}")
    return config
