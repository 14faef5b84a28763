"""Classical mapping model turning (basis bit-string, probability) into one weight.

Topology is (n+1) -> 10 -> 10 -> 1 with tanh hidden layers and a linear output.
Inputs are the basis bits remapped {0, 1} -> {-1, +1} (qubit 0 first) followed by
the probability scaled by 2^n. The flat parameter vector stores each layer's
weights row-major, then its biases: W1, b1, W2, b2, W3, b3.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError, DimensionError, ValidationError

HIDDEN = 10


def mapping_size(n: int) -> int:
    width = n + 1
    return width * HIDDEN + HIDDEN + HIDDEN * HIDDEN + HIDDEN + HIDDEN + 1


def _layer_shapes(n: int) -> list[tuple[int, ...]]:
    width = n + 1
    return [(HIDDEN, width), (HIDDEN,), (HIDDEN, HIDDEN), (HIDDEN,), (1, HIDDEN), (1,)]


@dataclass(frozen=True, eq=False)
class MappingParams:
    """Flat weights and biases of the mapping model for an n-qubit register."""

    values: np.ndarray
    n: int

    def __post_init__(self) -> None:
        expected = mapping_size(self.n)
        if self.values.shape != (expected,):
            raise DimensionError(
                f"Expected {expected} mapping parameters for n={self.n}, "
                f"got shape {self.values.shape}"
            )

    @property
    def size(self) -> int:
        return self.values.size

    def layers(self) -> tuple[np.ndarray, ...]:
        """Views (W1, b1, W2, b2, W3, b3) into the flat vector."""
        views = []
        offset = 0
        for shape in _layer_shapes(self.n):
            count = int(np.prod(shape))
            views.append(self.values[offset : offset + count].reshape(shape))
            offset += count
        return tuple(views)

    def with_values(self, values: np.ndarray) -> "MappingParams":
        return MappingParams(np.asarray(values, dtype=np.float64), self.n)


def init_mapping_params(n: int, rng: np.random.Generator) -> MappingParams:
    """Per-layer uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation."""
    parts = []
    for weight_shape, bias_shape in zip(
        _layer_shapes(n)[0::2], _layer_shapes(n)[1::2], strict=True
    ):
        bound = 1.0 / np.sqrt(weight_shape[1])
        parts.append(rng.uniform(-bound, bound, size=int(np.prod(weight_shape))))
        parts.append(rng.uniform(-bound, bound, size=bias_shape[0]))
    return MappingParams(np.concatenate(parts), n)


def basis_bits(n: int, k: int) -> np.ndarray:
    """(k, n) matrix of +-1 bits for basis indices 0..k-1, qubit 0 first."""
    indices = np.arange(k)[:, None]
    shifts = np.arange(n - 1, -1, -1)[None, :]
    return np.where((indices >> shifts) & 1, 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class MapInput:
    """Remapped bit-string plus the 2^n-scaled probability of one basis state."""

    bits: np.ndarray
    scaled_prob: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", np.asarray(self.bits, dtype=np.float64))
        if self.scaled_prob < 0:
            raise ValidationError("Scaled probability cannot be negative")
        if not np.all(np.isin(self.bits, (-1.0, 1.0))):
            raise ValidationError("Bits must be remapped to -1 / +1")

    @classmethod
    def for_basis(cls, index: int, n: int, prob: float) -> "MapInput":
        return cls(basis_bits(n, index + 1)[index], float((1 << n) * prob))

    def vector(self) -> np.ndarray:
        return np.append(np.asarray(self.bits, dtype=np.float64), self.scaled_prob)


def _check_input(beta: MappingParams, inp: MapInput) -> np.ndarray:
    if inp.bits.shape != (beta.n,):
        raise DimensionError(
            f"Mapping model expects {beta.n} bits, got shape {inp.bits.shape}"
        )
    return inp.vector()


def map_forward(beta: MappingParams, inp: MapInput) -> float:
    x = _check_input(beta, inp)
    w1, b1, w2, b2, w3, b3 = beta.layers()
    h1 = np.tanh(w1 @ x + b1)
    h2 = np.tanh(w2 @ h1 + b2)
    return float((w3 @ h2 + b3)[0])


def _batch_inputs(beta: MappingParams, probs: np.ndarray, k: int) -> np.ndarray:
    n = beta.n
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape != (1 << n,):
        raise DimensionError(f"Expected {1 << n} probabilities, got shape {probs.shape}")
    if k > (1 << n):
        raise CapacityError(f"Cannot generate {k} parameters from {1 << n} basis states")
    if k < 0:
        raise ValidationError("Parameter count cannot be negative")
    return np.hstack([basis_bits(n, k), (1 << n) * probs[:k, None]])


def map_all(beta: MappingParams, probs: np.ndarray, k: int) -> np.ndarray:
    """theta[i] = M_beta(bits(i), 2^n p_i) for the first k basis indices."""
    x = _batch_inputs(beta, probs, k)
    w1, b1, w2, b2, w3, b3 = beta.layers()
    h1 = np.tanh(x @ w1.T + b1)
    h2 = np.tanh(h1 @ w2.T + b2)
    return (h2 @ w3.T + b3)[:, 0]


def map_backward(
    beta: MappingParams, inp: MapInput, upstream: float
) -> tuple[np.ndarray, float]:
    """Reverse-mode pass returning (upstream * dθ/dβ, upstream * dθ/dp).

    The probability derivative is with respect to the raw p_i, so it includes
    the 2^n input scaling.
    """
    x = _check_input(beta, inp)
    w1, b1, w2, b2, w3, b3 = beta.layers()
    h1 = np.tanh(w1 @ x + b1)
    h2 = np.tanh(w2 @ h1 + b2)

    d_out = np.array([upstream], dtype=np.float64)
    d_w3 = np.outer(d_out, h2)
    d_z2 = (w3.T @ d_out) * (1.0 - h2**2)
    d_w2 = np.outer(d_z2, h1)
    d_z1 = (w2.T @ d_z2) * (1.0 - h1**2)
    d_w1 = np.outer(d_z1, x)
    d_x = w1.T @ d_z1

    grad_beta = np.concatenate(
        [d_w1.ravel(), d_z1, d_w2.ravel(), d_z2, d_w3.ravel(), d_out]
    )
    return grad_beta, float(d_x[-1] * (1 << beta.n))


def map_backward_all(
    beta: MappingParams, probs: np.ndarray, k: int, upstream: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Batched map_backward over the first k basis states.

    Returns the β-gradient summed over all k entries and the per-entry
    derivative with respect to each raw probability.
    """
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (k,):
        raise DimensionError(f"Expected {k} upstream values, got shape {upstream.shape}")
    x = _batch_inputs(beta, probs, k)
    w1, b1, w2, b2, w3, b3 = beta.layers()
    h1 = np.tanh(x @ w1.T + b1)
    h2 = np.tanh(h1 @ w2.T + b2)

    d_out = upstream[:, None]
    d_w3 = d_out.T @ h2
    d_z2 = (d_out @ w3) * (1.0 - h2**2)
    d_w2 = d_z2.T @ h1
    d_z1 = (d_z2 @ w2) * (1.0 - h1**2)
    d_w1 = d_z1.T @ x
    d_x = d_z1 @ w1

    grad_beta = np.concatenate(
        [
            d_w1.ravel(),
            d_z1.sum(axis=0),
            d_w2.ravel(),
            d_z2.sum(axis=0),
            d_w3.ravel(),
            [upstream.sum()],
        ]
    )
    return grad_beta, d_x[:, -1] * (1 << beta.n)
