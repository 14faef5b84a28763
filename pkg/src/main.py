#!/usr/bin/env python3
"""
Main entry point for the distributed QTRL simulator.

Trains quantum-generated policies on a gridworld, alone or with N synchronized
agents, and reproduces the parameter, reward and speedup comparisons.
"""

import logging
from pathlib import Path
from typing import Annotated

import typer

from .commands import cmd_bench_speedup, cmd_eval, cmd_params, cmd_train, cmd_verify
from .config import ExperimentConfig, load_config
from .exceptions import QTRLError

logging.basicConfig(
    level=logging.INFO, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

app = typer.Typer(help="Distributed Quantum-Train reinforcement learning simulator.")

ConfigOpt = Annotated[
    Path | None, typer.Option("--config", help="JSON file with flat config keys")
]
PresetOpt = Annotated[str | None, typer.Option("--preset", help="Named table preset")]
ModeOpt = Annotated[
    str | None,
    typer.Option(
        "--mode", help="classical-baseline, qtrl-centric or qtrl-distributed"
    ),
]
AgentsOpt = Annotated[int | None, typer.Option("--agents", help="Number of agents")]
LayersOpt = Annotated[int | None, typer.Option("--layers", help="Ansatz blocks L")]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Base seed")]
OutOpt = Annotated[str | None, typer.Option("--out", help="Output directory")]
SequentialOpt = Annotated[
    bool, typer.Option("--sequential", help="Run agents serially and reproducibly")
]
OptimizerOpt = Annotated[
    str | None, typer.Option("--optimizer", help="plain-ascent or adaptive-moment")
]
LrOpt = Annotated[float | None, typer.Option("--lr", help="Learning rate")]
GammaOpt = Annotated[float | None, typer.Option("--gamma", help="Discount factor")]
NoNormalizeOpt = Annotated[
    bool,
    typer.Option("--no-normalize-returns", help="Use raw discounted returns"),
]
MaxRoundsOpt = Annotated[
    int | None, typer.Option("--max-rounds", help="Synchronization round budget")
]
PastTargetOpt = Annotated[
    bool,
    typer.Option("--train-past-target", help="Keep training after the target is held"),
]
VerboseOpt = Annotated[bool, typer.Option("--verbose", help="Debug logging")]


def _set_verbosity(verbose: bool) -> None:
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def _resolve(
    config: Path | None,
    preset: str | None,
    mode: str | None,
    agents: int | None,
    layers: int | None,
    seed: int | None,
    out: str | None,
    sequential: bool,
    optimizer: str | None,
    lr: float | None,
    gamma: float | None,
    no_normalize_returns: bool,
    max_rounds: int | None,
    train_past_target: bool = False,
) -> ExperimentConfig:
    try:
        return load_config(
            config,
            preset=preset,
            mode=mode,
            agents=agents,
            layers=layers,
            base_seed=seed,
            out_dir=out,
            sequential=sequential or None,
            optimizer=optimizer,
            learning_rate=lr,
            gamma=gamma,
            normalize_returns=False if no_normalize_returns else None,
            max_rounds=max_rounds,
            stop_at_target=False if train_past_target else None,
        )
    except QTRLError as e:
        logger.error(f"Invalid configuration: {e}")
        raise typer.Exit(code=2) from e


@app.command()
def train(
    config: ConfigOpt = None,
    preset: PresetOpt = None,
    mode: ModeOpt = None,
    agents: AgentsOpt = None,
    layers: LayersOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    sequential: SequentialOpt = False,
    optimizer: OptimizerOpt = None,
    lr: LrOpt = None,
    gamma: GammaOpt = None,
    no_normalize_returns: NoNormalizeOpt = False,
    max_rounds: MaxRoundsOpt = None,
    train_past_target: PastTargetOpt = False,
    verbose: VerboseOpt = False,
) -> None:
    """Train one configuration; writes metrics.csv and model.ckpt."""
    _set_verbosity(verbose)
    cfg = _resolve(
        config, preset, mode, agents, layers, seed, out, sequential,
        optimizer, lr, gamma, no_normalize_returns, max_rounds, train_past_target,
    )  # fmt: skip
    raise typer.Exit(code=cmd_train(cfg))


@app.command("bench-speedup")
def bench_speedup(
    config: ConfigOpt = None,
    layers: LayersOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    sequential: SequentialOpt = False,
    optimizer: OptimizerOpt = None,
    lr: LrOpt = None,
    gamma: GammaOpt = None,
    no_normalize_returns: NoNormalizeOpt = False,
    max_rounds: MaxRoundsOpt = None,
    verbose: VerboseOpt = False,
) -> None:
    """Centric run versus distributed runs; writes speedup.csv."""
    _set_verbosity(verbose)
    cfg = _resolve(
        config, None, None, None, layers, seed, out, sequential,
        optimizer, lr, gamma, no_normalize_returns, max_rounds,
    )  # fmt: skip
    raise typer.Exit(code=cmd_bench_speedup(cfg))


@app.command()
def verify(
    suites: Annotated[
        list[str] | None, typer.Argument(help="gradient, oracle, env or all")
    ] = None,
    verbose: VerboseOpt = False,
) -> None:
    """Run gradient, simulator and environment self-checks."""
    _set_verbosity(verbose)
    raise typer.Exit(code=cmd_verify(suites or ["all"]))


@app.command("eval")
def evaluate(
    checkpoint: Annotated[Path, typer.Argument(help="Path to model.ckpt")],
    episodes: Annotated[int, typer.Option("--episodes", help="Episodes to run")] = 100,
    seed: Annotated[int, typer.Option("--seed", help="Evaluation seed")] = 0,
    verbose: VerboseOpt = False,
) -> None:
    """Average reward of a saved policy."""
    _set_verbosity(verbose)
    raise typer.Exit(code=cmd_eval(checkpoint, episodes, seed))


@app.command()
def params(
    layers: Annotated[
        list[int] | None, typer.Option("--layers", help="Depths to report")
    ] = None,
) -> None:
    """Trainable versus generated parameter counts."""
    raise typer.Exit(code=cmd_params(layers or [3, 7, 13]))


def main() -> None:
    """Main entry point for the dist-qtrl command."""
    app()


if __name__ == "__main__":
    main()
