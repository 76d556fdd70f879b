from typing import Hashable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import NumericError
from .base import Environment, NoiseConfig

# up, right, down, left as (row, col) deltas
MOVES = np.array([(-1, 0), (0, 1), (1, 0), (0, -1)])


class GridWorldConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    size: int = Field(8, ge=2)
    slip_prob: float = Field(0.2, ge=0.0, lt=1.0)
    step_penalty: float = -0.01
    goal_reward: float = 1.0
    max_steps: int = Field(200, ge=1)
    start: Tuple[int, int] = (0, 0)
    goal: Optional[Tuple[int, int]] = None

    @model_validator(mode="after")
    def _check_cells(self):
        goal = self.goal_cell
        for cell in (self.start, goal):
            if not (0 <= cell[0] < self.size and 0 <= cell[1] < self.size):
                raise ValueError(f"Cell {cell} outside a {self.size}x{self.size} grid")
        if tuple(self.start) == tuple(goal):
            raise ValueError("Goal cell must differ from start cell")
        return self

    @property
    def goal_cell(self) -> Tuple[int, int]:
        return tuple(self.goal) if self.goal is not None else (self.size - 1, self.size - 1)

    @property
    def n_states(self) -> int:
        return self.size * self.size


def _move(config: GridWorldConfig, cell: int, direction: int) -> int:
    row, col = divmod(cell, config.size)
    row = min(max(row + MOVES[direction][0], 0), config.size - 1)
    col = min(max(col + MOVES[direction][1], 0), config.size - 1)
    return int(row * config.size + col)


def _cell_index(config: GridWorldConfig, cell: Tuple[int, int]) -> int:
    return int(cell[0] * config.size + cell[1])


class GridWorld(Environment):
    """Slippery grid: with prob slip_prob the move goes one of the other three ways."""

    name = "gridworld"
    n_actions = 4

    def __init__(self, config: Optional[GridWorldConfig] = None, noise: Optional[NoiseConfig] = None,
                 encoding: str = "one_hot"):
        super().__init__(noise)
        self.config = config or GridWorldConfig()
        if encoding not in ("one_hot", "index"):
            raise ValueError(f"Unknown GridWorld encoding: {encoding}")
        self.encoding = encoding
        self.observation_dim = self.config.n_states if encoding == "one_hot" else 1
        self.max_steps = self.config.max_steps
        self.start_index = _cell_index(self.config, self.config.start)
        self.goal_index = _cell_index(self.config, self.config.goal_cell)
        self.position = self.start_index
        self._optimal: Optional[float] = None

    @property
    def optimal_reference(self) -> float:
        if self._optimal is None:
            self._optimal = gridworld_optimal(self.config)[0]
        return self._optimal

    def observe(self, cell: int) -> np.ndarray:
        if self.encoding == "index":
            return np.array([float(cell)])
        obs = np.zeros(self.config.n_states)
        obs[cell] = 1.0
        return obs

    def state_key(self, observation) -> Hashable:
        obs = np.asarray(observation)
        return int(obs[0]) if self.encoding == "index" else int(np.argmax(obs))

    def _reset(self, rng) -> np.ndarray:
        self.position = self.start_index
        return self.observe(self.position)

    def _transition(self, action: int, rng):
        direction = action
        if self.config.slip_prob > 0.0 and rng.random() < self.config.slip_prob:
            others = [d for d in range(4) if d != action]
            direction = others[int(rng.integers(3))]
        self.position = _move(self.config, self.position, direction)
        reached = self.position == self.goal_index
        reward = self.config.step_penalty + (self.config.goal_reward if reached else 0.0)
        return self.observe(self.position), reward, reached, reached


def transition_model(config: GridWorldConfig):
    """Exact kernel P[s, a, s'] and expected reward R[s, a]; the goal is absorbing with zero reward."""
    n = config.n_states
    goal = _cell_index(config, config.goal_cell)
    P = np.zeros((n, 4, n))
    R = np.zeros((n, 4))
    for s in range(n):
        if s == goal:
            P[s, :, s] = 1.0
            continue
        for a in range(4):
            for d in range(4):
                prob = 1.0 - config.slip_prob if d == a else config.slip_prob / 3.0
                if prob == 0.0:
                    continue
                nxt = _move(config, s, d)
                P[s, a, nxt] += prob
                R[s, a] += prob * (config.step_penalty + (config.goal_reward if nxt == goal else 0.0))
    return P, R


def gridworld_optimal(config: GridWorldConfig, tol: float = 1e-10, max_sweeps: int = 1_000_000,
                      discount: float = 1.0):
    """Value iteration for the undiscounted optimum from the start cell.

    Returns (optimal_return, greedy_policy, values). The step cap is ignored.
    """
    P, R = transition_model(config)
    goal = _cell_index(config, config.goal_cell)
    values = np.zeros(config.n_states)
    for _ in range(max_sweeps):
        q = R + discount * P @ values
        q[goal, :] = 0.0
        new_values = q.max(axis=1)
        gap = float(np.max(np.abs(new_values - values)))
        values = new_values
        if gap < tol:
            break
    else:
        raise NumericError(f"Value iteration did not converge within {max_sweeps} sweeps")
    q = R + discount * P @ values
    q[goal, :] = 0.0
    policy = q.argmax(axis=1)
    return float(values[_cell_index(config, config.start)]), policy, values
