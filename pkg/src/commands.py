"""Command implementations behind the CLI.

Each command returns a process exit status. Library errors are caught here,
logged, and turned into a non-zero status.
"""

import logging
from dataclasses import replace
from pathlib import Path

import typer

from .checkpoint import load_checkpoint, save_checkpoint
from .config import REFERENCE_REWARDS, REFERENCE_SIZES, REFERENCE_SPEEDUPS, ExperimentConfig
from .exceptions import QTRLError
from .formatters import (
    format_eval_summary,
    format_parameter_table,
    format_speedup_table,
    format_training_summary,
    format_verify_report,
)
from .metrics import MetricsCollector, export_speedup_csv
from .models import Mode, SpeedupRow, TrainingHistory
from .policy import CLASSICAL_TOPOLOGY, TrainableModel, init_classical_model
from .qtgen import GlobalModel, build_model, parameter_counts
from .sync import rounds_to_target, speedup, train_distributed
from .trainer import evaluate_policy
from .validators import validate_positive_int
from .verify import run_suites

logger = logging.getLogger(__name__)


def run_label(mode: Mode, layers: int, agents: int) -> str:
    if mode is Mode.CLASSICAL_BASELINE:
        return "Classical"
    if mode is Mode.QTRL_DISTRIBUTED:
        return f"Distributed QTRL-{layers} ({agents} agents)"
    return f"Centric QTRL-{layers}"


def reference_key(mode: Mode, layers: int | None, agents: int) -> str:
    if mode is Mode.CLASSICAL_BASELINE:
        return "classical"
    if mode is Mode.QTRL_DISTRIBUTED:
        return f"distributed-{layers}x{agents}"
    return f"centric-{layers}"


def build_trainable(config: ExperimentConfig) -> TrainableModel:
    if config.mode is Mode.CLASSICAL_BASELINE:
        return init_classical_model(config.topology, config.base_seed)
    return build_model(config.layers, config.topology, config.base_seed)


def describe_parameters(model: TrainableModel) -> str:
    if isinstance(model, GlobalModel):
        return (
            f"Trainable parameters: {model.trainable_count} "
            f"(circuit {model.phi.size} + mapping {model.beta.size}), "
            f"generated: {model.k} on {model.n} qubits"
        )
    return (
        f"Trainable parameters: {model.trainable_count} "
        f"for topology {model.topology.describe()}"
    )


def _train(
    config: ExperimentConfig, metrics: MetricsCollector | None = None
) -> tuple[TrainingHistory, TrainableModel]:
    model = build_trainable(config)
    typer.echo(describe_parameters(model))
    return train_distributed(model, config.to_sync_config(), metrics)


def cmd_train(config: ExperimentConfig) -> int:
    """Train one configuration and write metrics.csv and model.ckpt.

    Args:
        config: Validated experiment configuration

    Returns:
        Process exit status
    """
    label = run_label(config.mode, config.layers, config.num_agents)
    try:
        logger.info(f"Configuration: {config.to_dict()}")
        metrics = MetricsCollector()
        history, model = _train(config, metrics)
        metrics.export_csv(config.metrics_path)
        save_checkpoint(
            config.checkpoint_path,
            model,
            config.mode,
            config.base_seed,
            config.num_agents,
        )
        target = rounds_to_target(history, config.target_reward, config.target_window)
        typer.echo(format_training_summary(label, history, target))
        return 0
    except QTRLError as e:
        logger.error(f"Error training {label}: {e}")
        return 1
    except OSError as e:
        logger.error(f"I/O error training {label}: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error training {label}: {e}")
        return 1


def _speedup_row(
    config: ExperimentConfig,
    centric: tuple[int | None, int | None] | None,
) -> tuple[SpeedupRow, int | None, int | None]:
    agents = config.num_agents
    history, _ = _train(config)
    rounds = rounds_to_target(history, config.target_reward, config.target_window)
    episodes = None if rounds is None else rounds * agents * config.episodes_per_round
    label = run_label(config.mode, config.layers, agents)
    if centric is None:
        row = SpeedupRow(
            label=label,
            agents=agents,
            layers=config.layers,
            rounds_to_target=rounds,
            episodes_to_target=episodes,
            speedup_rounds=speedup(rounds, rounds),
            speedup_episodes=speedup(episodes, episodes),
            reference=None,
        )
    else:
        row = SpeedupRow(
            label=label,
            agents=agents,
            layers=config.layers,
            rounds_to_target=rounds,
            episodes_to_target=episodes,
            speedup_rounds=speedup(centric[0], rounds),
            speedup_episodes=speedup(centric[1], episodes),
            reference=REFERENCE_SPEEDUPS.get(agents),
        )
    if row.speedup_rounds is None:
        logger.warning(f"Speedup undefined for {label}: target not reached")
    return row, rounds, episodes


def bench_speedup(config: ExperimentConfig) -> list[SpeedupRow]:
    """Centric run followed by one distributed run per benchmark agent count."""
    centric_config = replace(config, mode=Mode.QTRL_CENTRIC, agents=1)
    centric_row, rounds, episodes = _speedup_row(centric_config, None)
    rows = [centric_row]
    for agents in config.bench_agents:
        distributed = replace(config, mode=Mode.QTRL_DISTRIBUTED, agents=agents)
        row, _, _ = _speedup_row(distributed, (rounds, episodes))
        rows.append(row)
    return rows


def cmd_bench_speedup(config: ExperimentConfig) -> int:
    """Run the speedup benchmark and write speedup.csv."""
    try:
        logger.info(f"Configuration: {config.to_dict()}")
        rows = bench_speedup(config)
        export_speedup_csv(rows, config.speedup_path)
        typer.echo(format_speedup_table(rows))
        return 0
    except QTRLError as e:
        logger.error(f"Error running speedup benchmark: {e}")
        return 1
    except OSError as e:
        logger.error(f"I/O error running speedup benchmark: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error running speedup benchmark: {e}")
        return 1


def cmd_verify(suites: list[str]) -> int:
    """Run verification suites; non-zero status when any check fails."""
    try:
        results = run_suites(suites or ["all"])
    except QTRLError as e:
        logger.error(f"Error running verification: {e}")
        return 1
    typer.echo(format_verify_report(results))
    failed = [r for r in results if not r.passed]
    for r in failed:
        logger.error(f"Check failed: [{r.suite}] {r.name}")
    return 1 if failed else 0


def cmd_eval(checkpoint: Path, episodes: int, seed: int = 0) -> int:
    """Evaluate a saved policy with sampled actions."""
    try:
        header, model = load_checkpoint(checkpoint)
        summary = evaluate_policy(model, episodes, seed)
        label = run_label(header.mode, header.layers or 0, header.agents)
        reference = REFERENCE_REWARDS.get(
            reference_key(header.mode, header.layers, header.agents)
        )
        typer.echo(format_eval_summary(label, summary, reference))
        return 0
    except QTRLError as e:
        logger.error(f"Error evaluating {checkpoint}: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error evaluating {checkpoint}: {e}")
        return 1


def cmd_params(layers: list[int]) -> int:
    """Print parameter accounting for the classical baseline and QTRL depths."""
    try:
        counts = [
            parameter_counts(validate_positive_int(L, "Layer count")) for L in layers
        ]
        typer.echo(format_parameter_table(CLASSICAL_TOPOLOGY, counts, REFERENCE_SIZES))
        return 0
    except QTRLError as e:
        logger.error(f"Error computing parameter counts: {e}")
        return 1
