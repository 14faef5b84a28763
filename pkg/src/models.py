"""Data models and enums shared across the QTRL simulator."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import ProtocolError


class Mode(Enum):
    """Training modes exposed by the harness."""

    CLASSICAL_BASELINE = "classical-baseline"
    QTRL_CENTRIC = "qtrl-centric"
    QTRL_DISTRIBUTED = "qtrl-distributed"


class OptimizerKind(Enum):
    """Update rule applied to the averaged gradient."""

    PLAIN_ASCENT = "plain-ascent"
    ADAPTIVE_MOMENT = "adaptive-moment"


class GradientMethod(Enum):
    """How the circuit part of the pull-back is differentiated."""

    SHIFT = "shift"
    ADJOINT = "adjoint"


class Activation(Enum):
    """Hidden-layer activation of the policy network."""

    TANH = "tanh"
    RELU = "relu"


@dataclass(frozen=True)
class Step:
    """One environment transition as seen by the learner."""

    obs: np.ndarray
    action: int
    reward: float


@dataclass
class Trajectory:
    """Ordered steps of a single episode."""

    steps: list[Step] = field(default_factory=list)

    def append(self, obs: np.ndarray, action: int, reward: float) -> None:
        self.steps.append(Step(obs, action, reward))

    @property
    def rewards(self) -> np.ndarray:
        return np.array([s.reward for s in self.steps], dtype=np.float64)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def episode_return(self) -> float:
        """Undiscounted episode reward (the success reward, or 0)."""
        return float(self.rewards.sum()) if self.steps else 0.0

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class GradientPacket:
    """Per-agent gradient over the flat [quantum | classical] parameter layout.

    For the classical baseline ``grad_phi`` is empty and ``grad_beta`` holds the
    gradient with respect to the policy weights themselves.
    """

    grad_phi: np.ndarray
    grad_beta: np.ndarray
    episode_return: float = 0.0
    episode_length: float = 0.0
    agent_index: int = 0
    episode_count: int = 1

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.grad_phi, self.grad_beta])

    @property
    def size(self) -> int:
        return self.grad_phi.size + self.grad_beta.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.flat))

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.grad_phi))) and bool(
            np.all(np.isfinite(self.grad_beta))
        )


@dataclass(frozen=True)
class RoundRecord:
    """Summary of one completed synchronization round."""

    round_index: int
    agent_returns: tuple[float, ...]
    agent_lengths: tuple[float, ...]
    agent_grad_norms: tuple[float, ...]
    mean_return: float
    moving_average: float
    grad_norm: float
    wall_ms: float | None
    episodes_per_agent: int

    @property
    def num_agents(self) -> int:
        return len(self.agent_returns)


@dataclass
class TrainingHistory:
    """Per-round records of a training run."""

    records: list[RoundRecord] = field(default_factory=list)
    parameter_trace: list[np.ndarray] = field(default_factory=list)

    def append(self, record: RoundRecord) -> None:
        if self.records and record.round_index <= self.records[-1].round_index:
            raise ProtocolError(
                f"Round {record.round_index} does not follow "
                f"round {self.records[-1].round_index}"
            )
        self.records.append(record)

    def mean_returns(self) -> np.ndarray:
        return np.array([r.mean_return for r in self.records], dtype=np.float64)

    @property
    def rounds(self) -> int:
        return len(self.records)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification check."""

    suite: str
    name: str
    max_error: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_error)) and self.max_error <= self.tolerance

    def __str__(self) -> str:
        icon = "✅" if self.passed else "❌"
        extra = f" ({self.detail})" if self.detail else ""
        return (
            f"{icon} [{self.suite}] {self.name}: "
            f"max error {self.max_error:.3e} <= {self.tolerance:.1e}{extra}"
        )


@dataclass(frozen=True)
class SpeedupRow:
    """One row of the speedup report."""

    label: str
    agents: int
    layers: int
    rounds_to_target: int | None
    episodes_to_target: int | None
    speedup_rounds: float | None
    speedup_episodes: float | None
    reference: float | None


@dataclass(frozen=True)
class EvalSummary:
    """Result of evaluating a policy over seeded episodes."""

    episodes: int
    mean_reward: float
    std_reward: float
    success_rate: float
