"""Statevector simulation of the n-qubit, L-block U3 ansatz.

Qubit 0 is the most significant bit of a basis index, so basis state
``|b_0 b_1 ... b_{n-1}>`` sits at index ``sum(b_q << (n - 1 - q))``. Internally a
state is kept as an n-axis tensor of shape ``(2,) * n`` whose axis ``q`` is qubit
``q``; C-order flattening then reproduces the index convention above.

Each block applies one U3 per qubit followed by a CNOT ring
``CNOT(q, (q + 1) mod n)`` for ``q = 0 .. n-1`` (omitted when ``n == 1``).
Angles are laid out block-major: ``index = block * 3n + 3 * qubit + j`` with
``j`` running over (theta, phi, lambda).
"""

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from typing import TypeAlias

import numpy as np

from .exceptions import DimensionError, InvalidGateError, QubitIndexError, ValidationError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SHIFT = np.pi / 2.0

ProbVector: TypeAlias = np.ndarray


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes of an n-qubit register."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError("A register needs at least one qubit")
        if self.amplitudes.shape != (1 << self.n,):
            raise DimensionError(
                f"Expected {1 << self.n} amplitudes for {self.n} qubits, "
                f"got shape {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, n)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)


@dataclass(frozen=True, eq=False)
class QuantumParams:
    """Rotation angles of the ansatz, three per qubit per block."""

    angles: np.ndarray
    n: int
    layers: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.layers < 1:
            raise ValidationError("Qubit count and block count must be positive")
        if self.angles.shape != (3 * self.n * self.layers,):
            raise DimensionError(
                f"Expected {3 * self.n * self.layers} angles "
                f"(n={self.n}, L={self.layers}), got shape {self.angles.shape}"
            )

    @property
    def size(self) -> int:
        return self.angles.size

    def blocks(self) -> np.ndarray:
        """Angles viewed as (layers, n, 3)."""
        return self.angles.reshape(self.layers, self.n, 3)

    def with_angles(self, angles: np.ndarray) -> "QuantumParams":
        return QuantumParams(np.asarray(angles, dtype=np.float64), self.n, self.layers)

    def reduced(self) -> "QuantumParams":
        """Angles folded into [0, 2π); probabilities are unchanged."""
        folded = np.mod(self.angles, TWO_PI)
        # tiny negatives round up to exactly 2π
        return self.with_angles(np.where(folded >= TWO_PI, 0.0, folded))


def init_quantum_params(n: int, layers: int, rng: np.random.Generator) -> QuantumParams:
    return QuantumParams(rng.uniform(0.0, TWO_PI, size=3 * n * layers), n, layers)


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=np.complex128,
    )


def u3_derivatives(theta: float, phi: float, lam: float) -> tuple[np.ndarray, ...]:
    """Partial derivatives of the U3 matrix with respect to (theta, phi, lambda)."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    e_phi = np.exp(1j * phi)
    e_lam = np.exp(1j * lam)
    e_both = np.exp(1j * (phi + lam))
    d_theta = 0.5 * np.array([[-s, -e_lam * c], [e_phi * c, -e_both * s]])
    d_phi = np.array([[0.0, 0.0], [1j * e_phi * s, 1j * e_both * c]])
    d_lam = np.array([[0.0, -1j * e_lam * s], [0.0, 1j * e_both * c]])
    return (
        d_theta.astype(np.complex128),
        d_phi.astype(np.complex128),
        d_lam.astype(np.complex128),
    )


def _gate_on_axis(psi: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(gate, psi, axes=([1], [qubit])), 0, qubit)


def _cnot_on_axes(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    out = psi.copy()
    index: list[int | slice] = [slice(None)] * psi.ndim
    index[control] = 1
    sub_axis = target if target < control else target - 1
    out[tuple(index)] = np.flip(psi[tuple(index)], axis=sub_axis)
    return out


def _check_qubit(qubit: int, n: int) -> None:
    if not 0 <= qubit < n:
        raise QubitIndexError(f"Qubit {qubit} out of range for {n}-qubit register")


def apply_u3(
    state: StateVector, qubit: int, theta: float, phi: float, lam: float
) -> StateVector:
    _check_qubit(qubit, state.n)
    psi = _gate_on_axis(state.tensor(), u3_matrix(theta, phi, lam), qubit)
    return StateVector(np.ascontiguousarray(psi).reshape(-1), state.n)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    if control == target:
        raise InvalidGateError(f"CNOT control and target are both qubit {control}")
    _check_qubit(control, state.n)
    _check_qubit(target, state.n)
    psi = _cnot_on_axes(state.tensor(), control, target)
    return StateVector(psi.reshape(-1), state.n)


def _circuit(params: QuantumParams) -> Iterator[tuple[str, int, int]]:
    """Yield ("u3", qubit, angle offset) and ("cx", control, target) in circuit order."""
    n = params.n
    for block in range(params.layers):
        for q in range(n):
            yield "u3", q, block * 3 * n + 3 * q
        if n > 1:
            for q in range(n):
                yield "cx", q, (q + 1) % n


def _run_tensor(angles: np.ndarray, params: QuantumParams) -> np.ndarray:
    psi = StateVector.zero(params.n).tensor().copy()
    for kind, a, b in _circuit(params):
        if kind == "u3":
            psi = _gate_on_axis(psi, u3_matrix(*angles[b : b + 3]), a)
        else:
            psi = _cnot_on_axes(psi, a, b)
    return psi


def run_ansatz(params: QuantumParams) -> StateVector:
    psi = _run_tensor(params.angles, params)
    return StateVector(np.ascontiguousarray(psi).reshape(-1), params.n)


def probabilities(state: StateVector) -> ProbVector:
    amps = state.amplitudes
    return amps.real**2 + amps.imag**2


def _probs_at(angles: np.ndarray, params: QuantumParams) -> ProbVector:
    psi = _run_tensor(angles, params).reshape(-1)
    return psi.real**2 + psi.imag**2


def _check_weights(params: QuantumParams, weights: np.ndarray) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (1 << params.n,):
        raise DimensionError(
            f"Expected {1 << params.n} weights, got shape {weights.shape}"
        )
    if not np.all(np.isfinite(weights)):
        raise ValidationError("Probability weights must be finite")
    return weights


def weighted_prob_gradient(params: QuantumParams, weights: np.ndarray) -> np.ndarray:
    """Gradient of sum_i weights[i] * p_i(angles) by the parameter-shift rule.

    Every U3 angle enters as a single Pauli-rotation generator, so
    df/dx = [f(x + π/2) - f(x - π/2)] / 2 exactly. Costs 2m ansatz runs.
    """
    weights = _check_weights(params, weights)
    angles = params.angles
    grad = np.empty(params.size, dtype=np.float64)
    shifted = angles.astype(np.float64, copy=True)
    for j in range(params.size):
        shifted[j] = angles[j] + SHIFT
        plus = float(weights @ _probs_at(shifted, params))
        shifted[j] = angles[j] - SHIFT
        minus = float(weights @ _probs_at(shifted, params))
        shifted[j] = angles[j]
        grad[j] = 0.5 * (plus - minus)
    return grad


def adjoint_weighted_prob_gradient(
    params: QuantumParams, weights: np.ndarray
) -> np.ndarray:
    """Same gradient as weighted_prob_gradient from one forward and one reverse sweep."""
    weights = _check_weights(params, weights)
    angles = params.angles
    shape = (2,) * params.n
    psi = _run_tensor(angles, params)
    lam = weights.reshape(shape) * psi
    grad = np.zeros(params.size, dtype=np.float64)
    for kind, a, b in reversed(list(_circuit(params))):
        if kind == "cx":
            psi = _cnot_on_axes(psi, a, b)
            lam = _cnot_on_axes(lam, a, b)
            continue
        gate_angles = angles[b : b + 3]
        inverse = u3_matrix(*gate_angles).conj().T
        psi = _gate_on_axis(psi, inverse, a)
        for j, d_gate in enumerate(u3_derivatives(*gate_angles)):
            grad[b + j] = 2.0 * np.vdot(lam, _gate_on_axis(psi, d_gate, a)).real
        lam = _gate_on_axis(lam, inverse, a)
    return grad
