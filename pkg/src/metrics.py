"""Metrics sink for training rounds and CSV export."""

import asyncio
import csv
import logging
from dataclasses import dataclass
from pathlib import Path

from .models import RoundRecord, SpeedupRow

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

METRICS_COLUMNS = (
    "schema_version",
    "round",
    "agent",
    "return",
    "length",
    "moving_avg",
    "grad_norm",
    "wall_ms",
)

SPEEDUP_COLUMNS = (
    "schema_version",
    "model",
    "agents",
    "layers",
    "rounds_to_target",
    "episodes_to_target",
    "speedup_rounds",
    "speedup_episodes",
    "reference",
)


def _num(value: float | int | None) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


@dataclass
class RunMetrics:
    """Aggregated counters of one training run"""

    rounds: int = 0
    episodes: int = 0
    best_moving_average: float = 0.0
    total_wall_ms: float = 0.0
    target_round: int | None = None


class MetricsCollector:
    """Collects round records emitted by the coordinator"""

    def __init__(self) -> None:
        self.records: list[RoundRecord] = []
        self.metrics = RunMetrics()
        self._lock = asyncio.Lock()

    async def record_round(self, record: RoundRecord) -> None:
        """Record a completed round and update counters"""
        async with self._lock:
            self.records.append(record)
            self.metrics.rounds += 1
            self.metrics.episodes += record.num_agents * (
                record.episodes_per_agent // record.round_index
            )
            self.metrics.best_moving_average = max(
                self.metrics.best_moving_average, record.moving_average
            )
            if record.wall_ms is not None:
                self.metrics.total_wall_ms += record.wall_ms

    async def record_target(self, round_index: int) -> None:
        async with self._lock:
            if self.metrics.target_round is None:
                self.metrics.target_round = round_index

    async def get_metrics_summary(self) -> dict:
        """Get current metrics summary"""
        async with self._lock:
            last = self.records[-1] if self.records else None
            return {
                "rounds": self.metrics.rounds,
                "episodes": self.metrics.episodes,
                "last_mean_return": last.mean_return if last else None,
                "last_moving_average": last.moving_average if last else None,
                "best_moving_average": self.metrics.best_moving_average,
                "target_round": self.metrics.target_round,
                "total_wall_ms": round(self.metrics.total_wall_ms, 1),
            }

    def rows(self) -> list[list[str]]:
        """One row per (round, agent) plus an aggregate row per round."""
        rows = []
        for record in self.records:
            wall = "" if record.wall_ms is None else f"{record.wall_ms:.3f}"
            for agent, (ret, length, norm) in enumerate(
                zip(
                    record.agent_returns,
                    record.agent_lengths,
                    record.agent_grad_norms,
                    strict=True,
                )
            ):
                rows.append(
                    [
                        str(SCHEMA_VERSION),
                        str(record.round_index),
                        str(agent),
                        _num(ret),
                        _num(length),
                        "",
                        _num(norm),
                        wall,
                    ]
                )
            mean_length = sum(record.agent_lengths) / record.num_agents
            rows.append(
                [
                    str(SCHEMA_VERSION),
                    str(record.round_index),
                    "mean",
                    _num(record.mean_return),
                    _num(mean_length),
                    _num(record.moving_average),
                    _num(record.grad_norm),
                    wall,
                ]
            )
        return rows

    def export_csv(self, filepath: str | Path) -> Path:
        """Write metrics.csv; an empty run still gets its header row."""
        path = Path(filepath)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(METRICS_COLUMNS)
            writer.writerows(self.rows())
        logger.info(f"Metrics exported to {path}")
        return path


def speedup_rows(rows: list[SpeedupRow]) -> list[list[str]]:
    return [
        [
            str(SCHEMA_VERSION),
            row.label,
            str(row.agents),
            str(row.layers),
            _num(row.rounds_to_target),
            _num(row.episodes_to_target),
            _num(row.speedup_rounds),
            _num(row.speedup_episodes),
            _num(row.reference),
        ]
        for row in rows
    ]


def export_speedup_csv(rows: list[SpeedupRow], filepath: str | Path) -> Path:
    path = Path(filepath)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SPEEDUP_COLUMNS)
        writer.writerows(speedup_rows(rows))
    logger.info(f"Speedup report exported to {path}")
    return path


async def log_metrics_summary(collector: MetricsCollector) -> None:
    """Log a summary of current metrics"""
    summary = await collector.get_metrics_summary()
    logger.info(
        f"Metrics Summary - "
        f"Rounds: {summary['rounds']}, "
        f"Episodes: {summary['episodes']}, "
        f"Best Moving Avg: {summary['best_moving_average']:.4f}, "
        f"Target Round: {summary['target_round']}"
    )
