"""One-hidden-layer softmax policy and its score function.

The flat parameter layout is W1 (hidden x obs_dim, row-major), b1, W2
(n_actions x hidden, row-major), b2. The QT policy uses (147, 6, 3) for
k = 909 generated weights; the classical baseline uses (147, 32, 3) for 4835.
"""

from dataclasses import dataclass
import sys
from typing import Protocol, TypeAlias

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

import numpy as np

from .exceptions import DimensionError, ValidationError
from .models import Activation, GradientMethod, GradientPacket

ActionDistribution: TypeAlias = np.ndarray


@dataclass(frozen=True)
class PolicyTopology:
    """Shape and activation of the policy network."""

    obs_dim: int = 147
    hidden: int = 6
    n_actions: int = 3
    activation: Activation = Activation.TANH

    @property
    def size(self) -> int:
        return (
            self.obs_dim * self.hidden
            + self.hidden
            + self.hidden * self.n_actions
            + self.n_actions
        )

    def describe(self) -> str:
        return f"({self.obs_dim}-{self.hidden}, {self.hidden}-{self.n_actions})"

    def to_dict(self) -> dict[str, int | str]:
        return {
            "obs_dim": self.obs_dim,
            "hidden": self.hidden,
            "n_actions": self.n_actions,
            "activation": self.activation.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PolicyTopology":
        return cls(
            obs_dim=int(data["obs_dim"]),
            hidden=int(data["hidden"]),
            n_actions=int(data["n_actions"]),
            activation=Activation(data["activation"]),
        )


QT_TOPOLOGY = PolicyTopology()
CLASSICAL_TOPOLOGY = PolicyTopology(hidden=32)


@dataclass(frozen=True, eq=False)
class PolicyWeights:
    """Unpacked view of a flat parameter vector."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray


def unpack(theta: np.ndarray, topology: PolicyTopology) -> PolicyWeights:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (topology.size,):
        raise DimensionError(
            f"Policy {topology.describe()} needs {topology.size} parameters, "
            f"got shape {theta.shape}"
        )
    o, h, a = topology.obs_dim, topology.hidden, topology.n_actions
    first = h * o
    second = first + h
    third = second + a * h
    return PolicyWeights(
        w1=theta[:first].reshape(h, o),
        b1=theta[first:second],
        w2=theta[second:third].reshape(a, h),
        b2=theta[third:],
    )


def pack(weights: PolicyWeights) -> np.ndarray:
    return np.concatenate(
        [weights.w1.ravel(), weights.b1, weights.w2.ravel(), weights.b2]
    )


def _activate(z: np.ndarray, activation: Activation) -> tuple[np.ndarray, np.ndarray]:
    """Activation value and its derivative."""
    if activation is Activation.RELU:
        return np.maximum(z, 0.0), (z > 0.0).astype(np.float64)
    h = np.tanh(z)
    return h, 1.0 - h**2


def _check_obs(obs: np.ndarray, topology: PolicyTopology) -> np.ndarray:
    obs = np.asarray(obs, dtype=np.float64)
    if obs.shape[-1:] != (topology.obs_dim,):
        raise DimensionError(
            f"Observation width {obs.shape[-1:]} does not match {topology.obs_dim}"
        )
    return obs


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def logits(
    theta: np.ndarray, obs: np.ndarray, topology: PolicyTopology = QT_TOPOLOGY
) -> np.ndarray:
    weights = unpack(theta, topology)
    obs = _check_obs(obs, topology)
    hidden, _ = _activate(obs @ weights.w1.T + weights.b1, topology.activation)
    return hidden @ weights.w2.T + weights.b2


def forward(
    theta: np.ndarray, obs: np.ndarray, topology: PolicyTopology = QT_TOPOLOGY
) -> ActionDistribution:
    return np.exp(_log_softmax(logits(theta, obs, topology)))


def log_prob(
    theta: np.ndarray,
    obs: np.ndarray,
    action: int,
    topology: PolicyTopology = QT_TOPOLOGY,
) -> float:
    _check_action(action, topology)
    return float(_log_softmax(logits(theta, obs, topology))[action])


def sample_action(dist: ActionDistribution, rng: np.random.Generator) -> int:
    """Inverse-CDF categorical sample from a single uniform draw."""
    cdf = np.cumsum(dist)
    index = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(index, len(dist) - 1)


def _check_action(action: int, topology: PolicyTopology) -> None:
    if not 0 <= action < topology.n_actions:
        raise ValidationError(
            f"Action {action} outside 0..{topology.n_actions - 1}"
        )


def logpi_grad(
    theta: np.ndarray,
    obs: np.ndarray,
    action: int,
    topology: PolicyTopology = QT_TOPOLOGY,
) -> np.ndarray:
    """Gradient of log π(action | obs) with respect to the flat θ."""
    _check_action(action, topology)
    obs = _check_obs(obs, topology)
    if obs.ndim != 1:
        raise DimensionError("logpi_grad takes a single observation")
    return weighted_score(theta, obs[None, :], np.array([action]), np.ones(1), topology)


def weighted_score(
    theta: np.ndarray,
    observations: np.ndarray,
    actions: np.ndarray,
    weights: np.ndarray,
    topology: PolicyTopology = QT_TOPOLOGY,
) -> np.ndarray:
    """sum_t weights[t] * ∇θ log π(actions[t] | observations[t]) in one batched pass."""
    params = unpack(theta, topology)
    observations = _check_obs(observations, topology)
    actions = np.asarray(actions, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    if not (observations.shape[0] == actions.shape[0] == weights.shape[0]):
        raise DimensionError("Observations, actions and weights must align")

    hidden, d_act = _activate(
        observations @ params.w1.T + params.b1, topology.activation
    )
    probs = np.exp(_log_softmax(hidden @ params.w2.T + params.b2))
    d_logits = -probs
    d_logits[np.arange(actions.shape[0]), actions] += 1.0
    d_logits *= weights[:, None]

    d_z1 = (d_logits @ params.w2) * d_act
    return pack(
        PolicyWeights(
            w1=d_z1.T @ observations,
            b1=d_z1.sum(axis=0),
            w2=d_logits.T @ hidden,
            b2=d_logits.sum(axis=0),
        )
    )


def init_policy_params(
    topology: PolicyTopology, rng: np.random.Generator
) -> np.ndarray:
    """Per-layer uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation."""
    o, h, a = topology.obs_dim, topology.hidden, topology.n_actions
    b_in = 1.0 / np.sqrt(o)
    b_hid = 1.0 / np.sqrt(h)
    return pack(
        PolicyWeights(
            w1=rng.uniform(-b_in, b_in, size=(h, o)),
            b1=rng.uniform(-b_in, b_in, size=h),
            w2=rng.uniform(-b_hid, b_hid, size=(a, h)),
            b2=rng.uniform(-b_hid, b_hid, size=a),
        )
    )


class TrainableModel(Protocol):
    """Immutable parameter snapshot that can produce policy weights."""

    @property
    def topology(self) -> PolicyTopology: ...

    @property
    def trainable_count(self) -> int: ...

    def generate_theta(self) -> np.ndarray: ...

    def pullback(
        self, grad_theta: np.ndarray, method: GradientMethod = GradientMethod.SHIFT
    ) -> GradientPacket: ...

    def parameters(self) -> np.ndarray: ...

    def with_parameters(self, flat: np.ndarray) -> Self: ...


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class ClassicalModel:
    """Directly trained policy weights for the classical baseline."""

    theta: np.ndarray
    policy: PolicyTopology = CLASSICAL_TOPOLOGY

    def __post_init__(self) -> None:
        unpack(self.theta, self.policy)
        object.__setattr__(self, "theta", _frozen(self.theta))

    @property
    def topology(self) -> PolicyTopology:
        return self.policy

    @property
    def trainable_count(self) -> int:
        return self.policy.size

    def generate_theta(self) -> np.ndarray:
        return self.theta

    def pullback(
        self, grad_theta: np.ndarray, method: GradientMethod = GradientMethod.SHIFT
    ) -> GradientPacket:
        grad_theta = np.asarray(grad_theta, dtype=np.float64)
        if grad_theta.shape != (self.policy.size,):
            raise DimensionError(
                f"Expected {self.policy.size} policy gradients, got {grad_theta.shape}"
            )
        return GradientPacket(np.empty(0), grad_theta.copy())

    def parameters(self) -> np.ndarray:
        return self.theta.copy()

    def with_parameters(self, flat: np.ndarray) -> "ClassicalModel":
        return ClassicalModel(flat, self.policy)


def init_classical_model(
    topology: PolicyTopology = CLASSICAL_TOPOLOGY, seed: int = 0
) -> ClassicalModel:
    rng = np.random.default_rng((seed, 0xC1A5))
    return ClassicalModel(init_policy_params(topology, rng), topology)
