"""Synchronous N-agent coordinator.

Each round the coordinator broadcasts an immutable snapshot, collects one
gradient packet per agent, averages them in agent-index order and applies a
single update. Agents never see a partially updated model, and a failed agent
aborts the round before any averaging happens.
"""

import asyncio
import logging
import time
from collections.abc import Sequence

import numpy as np

from .config import SyncConfig
from .exceptions import (
    AgentFailureError,
    PoisonedPacketError,
    ProtocolError,
    ValidationError,
)
from .metrics import MetricsCollector
from .models import GradientPacket, RoundRecord, TrainingHistory
from .optimizers import Optimizer, PlainAscent, TargetAnnealing, make_optimizer
from .policy import TrainableModel
from .trainer import Agent, AgentSettings, make_record, moving_average

logger = logging.getLogger(__name__)


def average_gradient(packets: Sequence[GradientPacket], size: int) -> np.ndarray:
    """Mean flat gradient, summed in ascending agent-index order.

    Raises:
        ProtocolError: If there are no packets or their sizes disagree with `size`
        PoisonedPacketError: If any packet holds a non-finite entry
    """
    if not packets:
        raise ProtocolError("Cannot synchronize an empty packet list")
    ordered = sorted(packets, key=lambda p: p.agent_index)
    for p in ordered:
        if p.size != size:
            raise ProtocolError(
                f"Packet from agent {p.agent_index} has {p.size} entries, "
                f"model has {size}"
            )
        if not p.is_finite:
            raise PoisonedPacketError(
                f"Packet from agent {p.agent_index} contains non-finite entries"
            )
    total = ordered[0].flat.copy()
    for p in ordered[1:]:
        total += p.flat
    return total / len(ordered)


def sync_round(
    model: TrainableModel,
    packets: Sequence[GradientPacket],
    eta: float,
    optimizer: Optimizer | None = None,
) -> TrainableModel:
    """Θ_new from Θ_old and the averaged packets; plain ascent unless told otherwise."""
    if optimizer is None:
        optimizer = PlainAscent(eta)
    average = average_gradient(packets, model.trainable_count)
    return apply_update(model, average, optimizer)


def apply_update(
    model: TrainableModel, average: np.ndarray, optimizer: Optimizer
) -> TrainableModel:
    return model.with_parameters(optimizer.step(model.parameters(), average))


def rounds_to_target(
    history: TrainingHistory, target: float, window: int
) -> int | None:
    """First 1-based round whose full trailing window averages at least `target`."""
    if window < 1:
        raise ValidationError("Target window must be at least 1")
    means = history.mean_returns()
    if means.size < window:
        return None
    reached = np.nonzero(moving_average(means, window)[window - 1 :] >= target)[0]
    if reached.size == 0:
        return None
    return history.records[int(reached[0]) + window - 1].round_index


def speedup(centric_rounds: int | None, distributed_rounds: int | None) -> float | None:
    """Centric over distributed rounds-to-target; None when either never arrived."""
    if centric_rounds is None or distributed_rounds is None:
        return None
    return centric_rounds / distributed_rounds


class Coordinator:
    """Owns the current model snapshot and drives synchronization rounds."""

    def __init__(
        self,
        model: TrainableModel,
        config: SyncConfig,
        metrics: MetricsCollector | None = None,
        collection_order: Sequence[int] | None = None,
    ):
        self.model = model
        self.config = config
        self.metrics = metrics
        settings = AgentSettings.from_sync_config(config)
        self.agents = [
            Agent(i, settings, config.base_seed) for i in range(config.num_agents)
        ]
        if collection_order is not None and sorted(collection_order) != list(
            range(config.num_agents)
        ):
            raise ProtocolError(
                f"Collection order {list(collection_order)} is not a permutation "
                f"of {config.num_agents} agents"
            )
        self.collection_order = list(collection_order or range(config.num_agents))
        self.optimizer = make_optimizer(config.optimizer, config.learning_rate)
        self.schedule = TargetAnnealing(
            self.optimizer,
            config.target_reward,
            config.target_window,
            config.anneal_factor,
            config.anneal_floor,
        )
        self.history = TrainingHistory()

    async def _collect(
        self, agent: Agent, snapshot: TrainableModel, round_index: int
    ) -> GradientPacket:
        try:
            if self.config.sequential:
                return agent.collect(snapshot)
            return await asyncio.to_thread(agent.collect, snapshot)
        except Exception as e:
            raise AgentFailureError(
                f"Agent {agent.index} failed in round {round_index}: {e}",
                agent.index,
                round_index,
            ) from e

    async def run_round(self, round_index: int) -> RoundRecord:
        snapshot = self.model
        start = time.perf_counter()
        agents = [self.agents[i] for i in self.collection_order]
        if self.config.sequential:
            packets = [await self._collect(a, snapshot, round_index) for a in agents]
        else:
            packets = list(
                await asyncio.gather(
                    *(self._collect(a, snapshot, round_index) for a in agents)
                )
            )
        packets.sort(key=lambda p: p.agent_index)

        average = average_gradient(packets, snapshot.trainable_count)
        self.model = apply_update(snapshot, average, self.optimizer)
        wall_ms = None if self.config.sequential else (time.perf_counter() - start) * 1e3

        record = make_record(
            round_index,
            packets,
            average,
            self.history,
            self.config.target_window,
            wall_ms,
        )
        self.history.append(record)
        if self.config.keep_trace:
            self.history.parameter_trace.append(self.model.parameters())
        self.schedule.update(round_index, record.moving_average)
        if self.metrics is not None:
            await self.metrics.record_round(record)
        return record

    def _target_reached(self, record: RoundRecord) -> bool:
        return (
            record.round_index >= self.config.target_window
            and record.moving_average >= self.config.target_reward
        )

    async def run(self) -> TrainingHistory:
        cfg = self.config
        logger.info(
            f"Starting training: agents={cfg.num_agents} rounds<={cfg.max_rounds} "
            f"optimizer={cfg.optimizer.value} lr={cfg.learning_rate} "
            f"trainable={self.model.trainable_count}"
        )
        for round_index in range(1, cfg.max_rounds + 1):
            try:
                record = await self.run_round(round_index)
            except AgentFailureError as e:
                logger.error(f"Round {round_index} aborted: {e}")
                raise
            if round_index % cfg.log_every == 0:
                logger.info(
                    f"Round {round_index}: mean return {record.mean_return:.4f}, "
                    f"moving avg {record.moving_average:.4f}, "
                    f"|g| {record.grad_norm:.3e}"
                )
            if self._target_reached(record):
                logger.info(
                    f"Target {cfg.target_reward} reached at round {round_index}"
                )
                if self.metrics is not None:
                    await self.metrics.record_target(round_index)
                if cfg.stop_at_target:
                    break
        else:
            if cfg.max_rounds and rounds_to_target(
                self.history, cfg.target_reward, cfg.target_window
            ) is None:
                logger.warning(
                    f"Target {cfg.target_reward} not reached in {cfg.max_rounds} rounds"
                )
        return self.history


async def run_distributed(
    model: TrainableModel,
    config: SyncConfig,
    metrics: MetricsCollector | None = None,
    collection_order: Sequence[int] | None = None,
) -> tuple[TrainingHistory, TrainableModel]:
    coordinator = Coordinator(model, config, metrics, collection_order)
    history = await coordinator.run()
    return history, coordinator.model


def train_distributed(
    model: TrainableModel,
    config: SyncConfig,
    metrics: MetricsCollector | None = None,
    collection_order: Sequence[int] | None = None,
) -> tuple[TrainingHistory, TrainableModel]:
    """Blocking wrapper around run_distributed."""
    return asyncio.run(run_distributed(model, config, metrics, collection_order))
