"""Single-agent REINFORCE on generated policy weights.

An agent pulls an immutable model snapshot, generates θ once for the episode,
samples a trajectory, turns discounted returns into a score-function gradient
with respect to θ and pulls that back to the model's trainable parameters.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import DimensionError, PoisonedPacketError, ValidationError
from .gridworld import GridWorld
from .models import (
    EvalSummary,
    GradientMethod,
    GradientPacket,
    RoundRecord,
    TrainingHistory,
    Trajectory,
)
from .optimizers import TargetAnnealing, make_optimizer
from .policy import TrainableModel, forward, sample_action, weighted_score
from .validators import validate_episodes, validate_gamma

if TYPE_CHECKING:
    from .config import SyncConfig

logger = logging.getLogger(__name__)

NORMALIZE_EPS = 1e-8


@dataclass(frozen=True)
class AgentSettings:
    """Per-agent learning settings shared by every agent of a run."""

    gamma: float = 0.99
    normalize_returns: bool = True
    gradient_method: GradientMethod = GradientMethod.ADJOINT
    episodes_per_round: int = 1

    @classmethod
    def from_sync_config(cls, config: "SyncConfig") -> "AgentSettings":
        return cls(
            gamma=config.gamma,
            normalize_returns=config.normalize_returns,
            gradient_method=config.gradient_method,
            episodes_per_round=config.episodes_per_round,
        )


def compute_returns(rewards: np.ndarray, gamma: float) -> np.ndarray:
    """G_t = r_t + γ G_{t+1}, evaluated backwards from G_T = r_T."""
    gamma = validate_gamma(gamma)
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.ndim != 1 or rewards.size == 0:
        raise ValidationError("Returns need a non-empty reward sequence")
    returns = np.empty_like(rewards)
    running = 0.0
    for t in range(rewards.size - 1, -1, -1):
        running = rewards[t] + gamma * running
        returns[t] = running
    return returns


def standardize(returns: np.ndarray) -> np.ndarray:
    if returns.size < 2:
        return returns
    return (returns - returns.mean()) / (returns.std() + NORMALIZE_EPS)


def run_episode(
    model: TrainableModel,
    env: GridWorld,
    rng: np.random.Generator,
    theta: np.ndarray | None = None,
) -> Trajectory:
    """Roll out one episode with θ held fixed from start to finish."""
    if theta is None:
        theta = model.generate_theta()
    topology = model.topology
    _, obs = env.reset()
    traj = Trajectory()
    done = False
    while not done:
        action = sample_action(forward(theta, obs, topology), rng)
        _, next_obs, reward, done = env.step(action)
        traj.append(obs, action, reward)
        obs = next_obs
    return traj


def episode_gradient(
    model: TrainableModel,
    traj: Trajectory,
    gamma: float,
    normalize: bool = True,
    method: GradientMethod = GradientMethod.SHIFT,
    theta: np.ndarray | None = None,
) -> GradientPacket:
    """(1/T) Σ_t Ĝ_t ∇ log π(a_t | s_t), pulled back to the trainable parameters.

    Raises:
        PoisonedPacketError: If the resulting gradient has non-finite entries
    """
    if len(traj) == 0:
        raise ValidationError("Cannot differentiate an empty trajectory")
    if theta is None:
        theta = model.generate_theta()
    returns = compute_returns(traj.rewards, gamma)
    if normalize:
        returns = standardize(returns)

    observations = np.stack([s.obs for s in traj.steps])
    actions = np.array([s.action for s in traj.steps], dtype=np.int64)
    grad_theta = weighted_score(theta, observations, actions, returns, model.topology)
    grad_theta /= len(traj)

    packet = model.pullback(grad_theta, method)
    if not packet.is_finite:
        raise PoisonedPacketError(
            f"Non-finite gradient from a {len(traj)}-step episode "
            f"(return {traj.episode_return})"
        )
    return GradientPacket(
        grad_phi=packet.grad_phi,
        grad_beta=packet.grad_beta,
        episode_return=traj.episode_return,
        episode_length=float(len(traj)),
    )


class Agent:
    """Worker owning a private environment and random stream."""

    def __init__(self, index: int, settings: AgentSettings, base_seed: int = 0):
        self.index = index
        self.settings = settings
        self.env = GridWorld()
        self.rng = np.random.default_rng(base_seed + index)
        self.episodes_run = 0

    def collect(self, snapshot: TrainableModel) -> GradientPacket:
        """Run episodes_per_round episodes and return their mean packet."""
        s = self.settings
        theta = snapshot.generate_theta()
        packets = []
        for _ in range(s.episodes_per_round):
            traj = run_episode(snapshot, self.env, self.rng, theta)
            packets.append(
                episode_gradient(
                    snapshot,
                    traj,
                    s.gamma,
                    s.normalize_returns,
                    s.gradient_method,
                    theta,
                )
            )
            self.episodes_run += 1

        count = len(packets)
        grad_phi = packets[0].grad_phi.copy()
        grad_beta = packets[0].grad_beta.copy()
        for p in packets[1:]:
            grad_phi += p.grad_phi
            grad_beta += p.grad_beta
        packet = GradientPacket(
            grad_phi=grad_phi / count,
            grad_beta=grad_beta / count,
            episode_return=float(np.mean([p.episode_return for p in packets])),
            episode_length=float(np.mean([p.episode_length for p in packets])),
            agent_index=self.index,
            episode_count=count,
        )
        logger.debug(
            f"Agent {self.index}: return={packet.episode_return:.4f} "
            f"length={packet.episode_length:.1f} |g|={packet.norm:.4e}"
        )
        return packet


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over up to `window` values ending at each index."""
    if window < 1:
        raise ValidationError("Moving-average window must be at least 1")
    values = np.asarray(values, dtype=np.float64)
    return np.array(
        [values[max(0, i - window + 1) : i + 1].mean() for i in range(values.size)],
        dtype=np.float64,
    )


def make_record(
    round_index: int,
    packets: list[GradientPacket],
    average: np.ndarray,
    history: TrainingHistory,
    window: int,
    wall_ms: float | None,
) -> RoundRecord:
    """Summarize one round; packets must already be in agent order."""
    returns = np.array([p.episode_return for p in packets], dtype=np.float64)
    mean_return = float(returns.mean())
    means = np.append(history.mean_returns(), mean_return)
    recent = means[max(0, means.size - window) :]
    return RoundRecord(
        round_index=round_index,
        agent_returns=tuple(float(r) for r in returns),
        agent_lengths=tuple(p.episode_length for p in packets),
        agent_grad_norms=tuple(p.norm for p in packets),
        mean_return=mean_return,
        moving_average=float(recent.mean()),
        grad_norm=float(np.linalg.norm(average)),
        wall_ms=wall_ms,
        episodes_per_agent=packets[0].episode_count * round_index,
    )


def train_single_agent(
    model: TrainableModel, config: "SyncConfig"
) -> tuple[TrainingHistory, TrainableModel]:
    """Bare one-agent loop without a coordinator; wall_ms is never recorded."""
    agent = Agent(0, AgentSettings.from_sync_config(config), config.base_seed)
    optimizer = make_optimizer(config.optimizer, config.learning_rate)
    schedule = TargetAnnealing(
        optimizer,
        config.target_reward,
        config.target_window,
        config.anneal_factor,
        config.anneal_floor,
    )
    history = TrainingHistory()
    for round_index in range(1, config.max_rounds + 1):
        packet = agent.collect(model)
        grad = packet.flat
        if grad.shape != (model.trainable_count,):
            raise DimensionError(
                f"Packet of size {grad.size} for a model of {model.trainable_count}"
            )
        model = model.with_parameters(optimizer.step(model.parameters(), grad))
        record = make_record(
            round_index, [packet], grad, history, config.target_window, None
        )
        history.append(record)
        if config.keep_trace:
            history.parameter_trace.append(model.parameters())
        schedule.update(round_index, record.moving_average)
        if (
            config.stop_at_target
            and round_index >= config.target_window
            and record.moving_average >= config.target_reward
        ):
            logger.info(f"Target {config.target_reward} reached at round {round_index}")
            break
    return history, model


def evaluate_policy(
    model: TrainableModel, episodes: int, seed: int = 0
) -> EvalSummary:
    """Sampled-action evaluation over seeded episodes."""
    episodes = validate_episodes(episodes)
    rng = np.random.default_rng(seed)
    env = GridWorld()
    theta = model.generate_theta()
    rewards = np.array(
        [run_episode(model, env, rng, theta).episode_return for _ in range(episodes)],
        dtype=np.float64,
    )
    return EvalSummary(
        episodes=episodes,
        mean_reward=float(rewards.mean()),
        std_reward=float(rewards.std()),
        success_rate=float(np.mean(rewards > 0)),
    )
