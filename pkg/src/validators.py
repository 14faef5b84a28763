"""Input validation functions for QTRL configuration values."""

from typing import TYPE_CHECKING, Any

from .exceptions import ValidationError

if TYPE_CHECKING:
    from .config import ExperimentConfig, SyncConfig

PRESET_LAYERS = frozenset({3, 7, 13})
PRESET_AGENTS = frozenset({1, 2, 4, 8})


def validate_gamma(gamma: Any) -> float:
    """Validate a discount factor.

    Args:
        gamma: Discount factor

    Returns:
        The discount factor as a float

    Raises:
        ValidationError: If gamma is not a number in [0, 1]
    """
    if isinstance(gamma, bool) or not isinstance(gamma, int | float):
        raise ValidationError("Discount factor must be a number")
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"Discount factor must be in [0, 1], got {gamma}")
    return float(gamma)


def validate_positive_int(value: Any, name: str, minimum: int = 1) -> int:
    """Validate an integer setting with a lower bound.

    Raises:
        ValidationError: If value is not an integer >= minimum
    """
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{name} must be an integer")
    if value < minimum:
        raise ValidationError(f"{name} must be at least {minimum}, got {value}")
    return value


def validate_learning_rate(learning_rate: Any) -> float:
    if isinstance(learning_rate, bool) or not isinstance(learning_rate, int | float):
        raise ValidationError("Learning rate must be a number")
    if not learning_rate > 0:
        raise ValidationError(f"Learning rate must be positive, got {learning_rate}")
    return float(learning_rate)


def validate_anneal(factor: Any, floor: Any) -> tuple[float, float]:
    """Validate the learning-rate annealing schedule.

    Raises:
        ValidationError: If either value is not a number in (0, 1]
    """
    for name, value in (("Anneal factor", factor), ("Anneal floor", floor)):
        if isinstance(value, bool) or not isinstance(value, int | float):
            raise ValidationError(f"{name} must be a number")
        if not 0.0 < value <= 1.0:
            raise ValidationError(f"{name} must be in (0, 1], got {value}")
    return float(factor), float(floor)


def validate_target(target_reward: Any, target_window: Any) -> tuple[float, int]:
    """Validate the rounds-to-target criterion.

    Raises:
        ValidationError: If the target is outside (0, 1] or the window is below 1
    """
    if isinstance(target_reward, bool) or not isinstance(target_reward, int | float):
        raise ValidationError("Target reward must be a number")
    if not 0.0 < target_reward <= 1.0:
        raise ValidationError(f"Target reward must be in (0, 1], got {target_reward}")
    return float(target_reward), validate_positive_int(target_window, "Target window")


def validate_sync_config(config: "SyncConfig") -> None:
    validate_positive_int(config.num_agents, "Number of agents")
    validate_learning_rate(config.learning_rate)
    validate_positive_int(config.episodes_per_round, "Episodes per round")
    validate_positive_int(config.max_rounds, "Max rounds", minimum=0)
    validate_target(config.target_reward, config.target_window)
    validate_gamma(config.gamma)
    validate_positive_int(config.log_every, "Log interval")
    validate_anneal(config.anneal_factor, config.anneal_floor)


def validate_experiment_config(config: "ExperimentConfig") -> None:
    """Validate an experiment configuration as a whole.

    Raises:
        ValidationError: If any field is out of range
    """
    validate_positive_int(config.layers, "Layer count")
    validate_positive_int(config.agents, "Number of agents")
    validate_gamma(config.gamma)
    validate_learning_rate(config.learning_rate)
    if config.max_rounds is not None:
        validate_positive_int(config.max_rounds, "Max rounds", minimum=0)
    validate_target(config.target_reward, config.target_window)
    validate_positive_int(config.episodes_per_round, "Episodes per round")
    validate_positive_int(config.log_every, "Log interval")
    validate_positive_int(config.eval_episodes, "Evaluation episodes")
    validate_anneal(config.anneal_factor, config.anneal_floor)
    for agents in config.bench_agents:
        validate_positive_int(agents, "Benchmark agent count")
    if not config.out_dir:
        raise ValidationError("Output directory cannot be empty")


def validate_preset_shape(layers: int, agents: int) -> None:
    """Check that a configuration matches one of the published table rows.

    Raises:
        ValidationError: If layers or agents fall outside the preset grid
    """
    if layers not in PRESET_LAYERS:
        raise ValidationError(
            f"Preset layer count must be one of {sorted(PRESET_LAYERS)}, got {layers}"
        )
    if agents not in PRESET_AGENTS:
        raise ValidationError(
            f"Preset agent count must be one of {sorted(PRESET_AGENTS)}, got {agents}"
        )


def validate_episodes(episodes: Any) -> int:
    if isinstance(episodes, bool) or not isinstance(episodes, int) or episodes < 1:
        raise ValidationError("Evaluation needs at least one episode")
    return episodes
