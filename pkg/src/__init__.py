"""Distributed Quantum-Train reinforcement learning simulator."""

from .config import ExperimentConfig, SyncConfig, load_config
from .exceptions import (
    AgentFailureError,
    CheckpointError,
    CompressionError,
    PoisonedPacketError,
    ProtocolError,
    QTRLError,
    ValidationError,
)
from .gridworld import GridWorld, encode_obs
from .models import GradientPacket, Mode, TrainingHistory, Trajectory
from .policy import ClassicalModel, PolicyTopology
from .qtgen import GlobalModel, build_model, generate_theta, pullback_gradient
from .sync import Coordinator, rounds_to_target, speedup, sync_round, train_distributed
from .trainer import compute_returns, episode_gradient, run_episode, train_single_agent

__version__ = "1.0.0"

__all__ = [
    # Models
    "Mode",
    "Trajectory",
    "GradientPacket",
    "TrainingHistory",
    "PolicyTopology",
    "GlobalModel",
    "ClassicalModel",
    # Exceptions
    "QTRLError",
    "ValidationError",
    "CompressionError",
    "PoisonedPacketError",
    "ProtocolError",
    "AgentFailureError",
    "CheckpointError",
    # Generation
    "build_model",
    "generate_theta",
    "pullback_gradient",
    # Environment and training
    "GridWorld",
    "encode_obs",
    "run_episode",
    "compute_returns",
    "episode_gradient",
    "train_single_agent",
    # Synchronization
    "Coordinator",
    "sync_round",
    "train_distributed",
    "rounds_to_target",
    "speedup",
    # Config
    "ExperimentConfig",
    "SyncConfig",
    "load_config",
]
