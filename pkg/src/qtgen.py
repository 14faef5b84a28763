"""Quantum-Train parameter generation: θ = M_β(φ) and its pull-back.

The circuit's basis-state probabilities feed the mapping model once per basis
index, producing the first k of 2^n possible weights; surplus basis states are
ignored. Gradients with respect to θ are pulled back to (φ, β) with a single
weighted-probability gradient call, since ∂/∂φ sum_i w_i θ_i reduces to the
gradient of sum_i (∂J/∂p_i) p_i.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import CompressionError, DimensionError, ValidationError
from .mapper import MappingParams, init_mapping_params, map_all, map_backward_all, mapping_size
from .models import GradientMethod, GradientPacket
from .policy import QT_TOPOLOGY, PolicyTopology
from .qsim import (
    QuantumParams,
    adjoint_weighted_prob_gradient,
    init_quantum_params,
    probabilities,
    run_ansatz,
    weighted_prob_gradient,
)

logger = logging.getLogger(__name__)


def required_qubits(k: int) -> int:
    """n = ceil(log2 k), at least one qubit."""
    if k < 1:
        raise ValidationError("At least one generated parameter is required")
    return max(1, (k - 1).bit_length())


@dataclass(frozen=True)
class ParameterCounts:
    """Trainable versus generated parameter accounting for one configuration."""

    n: int
    layers: int
    quantum: int
    mapping: int
    generated: int

    @property
    def trainable(self) -> int:
        return self.quantum + self.mapping

    @property
    def compression_ratio(self) -> float:
        return self.generated / self.trainable


def parameter_counts(layers: int, topology: PolicyTopology = QT_TOPOLOGY) -> ParameterCounts:
    k = topology.size
    n = required_qubits(k)
    return ParameterCounts(
        n=n, layers=layers, quantum=3 * n * layers, mapping=mapping_size(n), generated=k
    )


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class GlobalModel:
    """Shared trainable state Θ = {φ, β} generating k policy weights.

    Instances are immutable snapshots; updates produce a new model.
    """

    phi: QuantumParams
    beta: MappingParams
    k: int
    policy: PolicyTopology | None = QT_TOPOLOGY
    enforce_compression: bool = True

    def __post_init__(self) -> None:
        if self.phi.n != self.beta.n:
            raise DimensionError(
                f"Circuit has {self.phi.n} qubits but mapping expects {self.beta.n}"
            )
        if self.policy is not None and self.policy.size != self.k:
            raise DimensionError(
                f"Policy {self.policy.describe()} needs {self.policy.size} weights, "
                f"model generates {self.k}"
            )
        if self.phi.n != required_qubits(self.k):
            raise ValidationError(
                f"{self.k} generated parameters need {required_qubits(self.k)} "
                f"qubits, got {self.phi.n}"
            )
        if self.enforce_compression and self.trainable_count >= self.k:
            raise CompressionError(
                f"Trainable size {self.trainable_count} does not compress "
                f"{self.k} generated parameters"
            )
        object.__setattr__(self, "phi", self.phi.with_angles(_readonly(self.phi.angles)))
        object.__setattr__(self, "beta", self.beta.with_values(_readonly(self.beta.values)))

    @property
    def n(self) -> int:
        return self.phi.n

    @property
    def layers(self) -> int:
        return self.phi.layers

    @property
    def trainable_count(self) -> int:
        return self.phi.size + self.beta.size

    @property
    def topology(self) -> PolicyTopology:
        if self.policy is None:
            raise ValidationError("This model is not attached to a policy topology")
        return self.policy

    def generate_theta(self) -> np.ndarray:
        return generate_theta(self)

    def pullback(
        self, grad_theta: np.ndarray, method: GradientMethod = GradientMethod.SHIFT
    ) -> GradientPacket:
        return pullback_gradient(self, grad_theta, method)

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.phi.angles, self.beta.values])

    def with_parameters(self, flat: np.ndarray) -> "GlobalModel":
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.trainable_count,):
            raise DimensionError(
                f"Expected {self.trainable_count} parameters, got shape {flat.shape}"
            )
        m = self.phi.size
        return GlobalModel(
            phi=self.phi.with_angles(flat[:m]),
            beta=self.beta.with_values(flat[m:]),
            k=self.k,
            policy=self.policy,
            enforce_compression=self.enforce_compression,
        )


def build_model(
    layers: int,
    topology: PolicyTopology = QT_TOPOLOGY,
    seed: int = 0,
) -> GlobalModel:
    """Seeded model for a policy topology; φ ~ U[0, 2π), β per-layer uniform."""
    rng = np.random.default_rng((seed, 0x5EED))
    n = required_qubits(topology.size)
    phi = init_quantum_params(n, layers, rng)
    beta = init_mapping_params(n, rng)
    model = GlobalModel(phi=phi, beta=beta, k=topology.size, policy=topology)
    logger.debug(
        f"Built model n={n} L={layers} trainable={model.trainable_count} k={model.k}"
    )
    return model


def generate_theta(model: GlobalModel) -> np.ndarray:
    probs = probabilities(run_ansatz(model.phi))
    return map_all(model.beta, probs, model.k)


def pullback_gradient(
    model: GlobalModel,
    grad_theta: np.ndarray,
    method: GradientMethod = GradientMethod.SHIFT,
) -> GradientPacket:
    """Chain rule from ∇θ J to (∇φ J, ∇β J)."""
    grad_theta = np.asarray(grad_theta, dtype=np.float64)
    if grad_theta.shape != (model.k,):
        raise DimensionError(
            f"Expected {model.k} policy gradients, got shape {grad_theta.shape}"
        )
    probs = probabilities(run_ansatz(model.phi))
    grad_beta, grad_prob = map_backward_all(model.beta, probs, model.k, grad_theta)

    weights = np.zeros(1 << model.n, dtype=np.float64)
    weights[: model.k] = grad_prob
    if method is GradientMethod.ADJOINT:
        grad_phi = adjoint_weighted_prob_gradient(model.phi, weights)
    else:
        grad_phi = weighted_prob_gradient(model.phi, weights)
    return GradientPacket(grad_phi=grad_phi, grad_beta=grad_beta)
