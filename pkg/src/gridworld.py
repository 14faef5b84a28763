"""Desk-scale reimplementation of the MiniGrid Empty-5x5 task.

The 5x5 grid has a wall border and a 3x3 interior (coordinates 1..3). The agent
starts at (1, 1) facing east and must reach the goal at (3, 3). Observations are
the 7x7 egocentric window in front of the agent, with the agent at window cell
(3, 6) looking "up"; the array is indexed [view_x, view_y, channel] and
flattened in C order to 147 values.

Cell codes follow MiniGrid: object unseen=0, empty=1, wall=2, goal=8 (channel
maximum 10); color none=0, green=1, grey=5 (maximum 5); state always 0
(maximum 2). Each channel is divided by its maximum.
"""

import logging
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from .exceptions import ContractViolationError, ValidationError

logger = logging.getLogger(__name__)

GRID_SIZE = 5
MAX_STEPS = 4 * GRID_SIZE**2
VIEW_SIZE = 7
OBS_SIZE = VIEW_SIZE * VIEW_SIZE * 3
START_POS = (1, 1)
GOAL_POS = (3, 3)

OBJECT_UNSEEN = 0
OBJECT_EMPTY = 1
OBJECT_WALL = 2
OBJECT_GOAL = 8
COLOR_NONE = 0
COLOR_GREEN = 1
COLOR_GREY = 5
CHANNEL_MAX = np.array([10.0, 5.0, 2.0])


class Action(IntEnum):
    LEFT = 0
    RIGHT = 1
    FORWARD = 2


class Direction(IntEnum):
    EAST = 0
    SOUTH = 1
    WEST = 2
    NORTH = 3

    @property
    def vector(self) -> tuple[int, int]:
        return _DIR_VECTORS[self]


_DIR_VECTORS = {
    Direction.EAST: (1, 0),
    Direction.SOUTH: (0, 1),
    Direction.WEST: (-1, 0),
    Direction.NORTH: (0, -1),
}


@dataclass(frozen=True)
class EnvState:
    """Complete state of one episode."""

    agent_pos: tuple[int, int] = START_POS
    agent_dir: Direction = Direction.EAST
    goal_pos: tuple[int, int] = GOAL_POS
    step_count: int = 0
    done: bool = False


def _cell(x: int, y: int, goal: tuple[int, int]) -> tuple[int, int, int]:
    if not (0 <= x < GRID_SIZE and 0 <= y < GRID_SIZE):
        return OBJECT_UNSEEN, COLOR_NONE, 0
    if x in (0, GRID_SIZE - 1) or y in (0, GRID_SIZE - 1):
        return OBJECT_WALL, COLOR_GREY, 0
    if (x, y) == goal:
        return OBJECT_GOAL, COLOR_GREEN, 0
    return OBJECT_EMPTY, COLOR_NONE, 0


def _is_wall(x: int, y: int) -> bool:
    return not (0 < x < GRID_SIZE - 1 and 0 < y < GRID_SIZE - 1)


def encode_obs(state: EnvState) -> np.ndarray:
    """Egocentric 7x7x3 window, normalized and flattened."""
    fx, fy = state.agent_dir.vector
    rx, ry = -fy, fx
    ax, ay = state.agent_pos
    center = VIEW_SIZE // 2
    image = np.zeros((VIEW_SIZE, VIEW_SIZE, 3), dtype=np.float64)
    for vx in range(VIEW_SIZE):
        for vy in range(VIEW_SIZE):
            ahead = VIEW_SIZE - 1 - vy
            side = vx - center
            image[vx, vy] = _cell(
                ax + fx * ahead + rx * side, ay + fy * ahead + ry * side, state.goal_pos
            )
    return (image / CHANNEL_MAX).reshape(-1)


def success_reward(step_count: int) -> float:
    return 1.0 - 0.9 * (step_count / MAX_STEPS)


class GridWorld:
    """One private environment instance; agents never share these."""

    def __init__(self) -> None:
        self.state = EnvState()

    def reset(self, seed: int | None = None) -> tuple[EnvState, np.ndarray]:
        # The layout is fixed; the seed is accepted for API symmetry only.
        self.state = EnvState()
        return self.state, encode_obs(self.state)

    def step(self, action: int) -> tuple[EnvState, np.ndarray, float, bool]:
        self.state, obs, reward, done = step(self.state, action)
        return self.state, obs, reward, done


def step(state: EnvState, action: int) -> tuple[EnvState, np.ndarray, float, bool]:
    """Pure transition function."""
    if state.done:
        raise ContractViolationError("Cannot step an environment whose episode ended")
    try:
        action = Action(action)
    except ValueError as e:
        raise ValidationError(f"Unknown action {action}") from e

    direction = state.agent_dir
    pos = state.agent_pos
    if action is Action.LEFT:
        direction = Direction((direction - 1) % 4)
    elif action is Action.RIGHT:
        direction = Direction((direction + 1) % 4)
    else:
        dx, dy = direction.vector
        target = (pos[0] + dx, pos[1] + dy)
        if not _is_wall(*target):
            pos = target

    step_count = state.step_count + 1
    reward = 0.0
    done = False
    if pos == state.goal_pos:
        reward = success_reward(step_count)
        done = True
    elif step_count >= MAX_STEPS:
        done = True

    new_state = replace(
        state, agent_pos=pos, agent_dir=direction, step_count=step_count, done=done
    )
    return new_state, encode_obs(new_state), reward, done


def random_agent_success_rate(episodes: int, seed: int = 0) -> tuple[float, float]:
    """Success rate and mean reward of a uniform-random agent."""
    if episodes < 1:
        raise ValidationError("At least one episode is required")
    rng = np.random.default_rng(seed)
    env = GridWorld()
    successes = 0
    total = 0.0
    for _ in range(episodes):
        env.reset()
        done = False
        reward = 0.0
        while not done:
            _, _, reward, done = env.step(int(rng.integers(3)))
        successes += reward > 0
        total += reward
    return successes / episodes, total / episodes
