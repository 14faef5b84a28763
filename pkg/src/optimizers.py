"""Update rules applied by the coordinator to the averaged gradient.

Both rules ascend: the gradient is added to the parameters.
"""

import logging
from typing import Protocol

import numpy as np

from .exceptions import DimensionError, ValidationError
from .models import OptimizerKind
from .validators import validate_anneal

logger = logging.getLogger(__name__)


class Optimizer(Protocol):
    """Stateful map from (parameters, averaged gradient) to new parameters."""

    learning_rate: float

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray: ...


def _check(params: np.ndarray, grad: np.ndarray) -> None:
    if params.shape != grad.shape:
        raise DimensionError(
            f"Gradient shape {grad.shape} does not match parameters {params.shape}"
        )


class PlainAscent:
    """Θ_new = Θ_old + η g."""

    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValidationError("Learning rate must be positive")
        self.learning_rate = learning_rate

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        _check(params, grad)
        return params + self.learning_rate * grad


class AdaptiveMoment:
    """Bias-corrected first/second moment update, used for ascent."""

    def __init__(
        self,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if learning_rate <= 0:
            raise ValidationError("Learning rate must be positive")
        if not (0.0 <= beta1 < 1.0 and 0.0 <= beta2 < 1.0):
            raise ValidationError("Moment decay rates must lie in [0, 1)")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """One moment update; an all-zero gradient leaves parameters and moments alone."""
        _check(params, grad)
        if not np.any(grad):
            return params.copy()
        if self.m is None or self.v is None:
            self.m = np.zeros_like(grad)
            self.v = np.zeros_like(grad)
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return params + self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(kind: OptimizerKind, learning_rate: float) -> Optimizer:
    if kind is OptimizerKind.PLAIN_ASCENT:
        return PlainAscent(learning_rate)
    return AdaptiveMoment(learning_rate)


class TargetAnnealing:
    """Shrinks the learning rate for every round the moving average holds the target.

    The rate is multiplied by `factor` after each such round and never drops
    below `floor` times its starting value. It is never raised again, so a
    policy that reached the target keeps training with ever smaller steps.
    A factor of 1 disables the schedule.
    """

    def __init__(
        self,
        optimizer: Optimizer,
        target_reward: float,
        window: int,
        factor: float = 0.9,
        floor: float = 1e-3,
    ):
        factor, floor = validate_anneal(factor, floor)
        self.optimizer = optimizer
        self.target_reward = target_reward
        self.window = window
        self.factor = factor
        self.min_learning_rate = optimizer.learning_rate * floor

    def update(self, round_index: int, moving_average: float) -> float:
        """Apply the schedule after a round and return the rate for the next one."""
        opt = self.optimizer
        if round_index >= self.window and moving_average >= self.target_reward:
            annealed = max(opt.learning_rate * self.factor, self.min_learning_rate)
            if annealed < opt.learning_rate:
                logger.debug(
                    f"Round {round_index}: learning rate {opt.learning_rate:.3e} "
                    f"-> {annealed:.3e}"
                )
            opt.learning_rate = annealed
        return opt.learning_rate
