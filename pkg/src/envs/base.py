from abc import ABC, abstractmethod
from typing import Any, Hashable, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.errors import ContractError


class EnvStepResult(NamedTuple):
    next_state: np.ndarray
    reward: float
    done: bool
    truncated: bool = False
    success: bool = False


class NoiseConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    action_noise_prob: float = Field(0.0, ge=0.0, le=1.0)


class Environment(ABC):
    """Episodic environment with a discrete action set.

    Subclasses implement `_reset` and `_transition`; this base class owns the
    done/step-cap bookkeeping and the i.i.d. action-noise wrapper.
    """

    name: str = "env"
    observation_dim: int = 0
    n_actions: int = 0
    max_steps: int = 500
    # Failure is judged relative to (optimal_reference - return_floor)
    return_floor: float = 0.0

    def __init__(self, noise: Optional[NoiseConfig] = None):
        self.noise = noise or NoiseConfig()
        self.steps = 0
        self.done = True

    @property
    @abstractmethod
    def optimal_reference(self) -> float:
        ...

    def reset(self, rng) -> np.ndarray:
        self.steps = 0
        self.done = False
        return self._reset(rng)

    def step(self, action: int, rng) -> EnvStepResult:
        if self.done:
            raise ContractError(f"{self.name}: step() called on a finished episode; call reset() first")
        action = int(action)
        if not 0 <= action < self.n_actions:
            raise ContractError(f"{self.name}: action {action} outside [0, {self.n_actions})")
        if self.noise.action_noise_prob > 0.0 and rng.random() < self.noise.action_noise_prob:
            action = int(rng.integers(self.n_actions))
        self.steps += 1
        next_state, reward, terminal, success = self._transition(action, rng)
        truncated = (not terminal) and self.steps >= self.max_steps
        self.done = terminal or truncated
        return EnvStepResult(next_state, float(reward), self.done, truncated, success)

    def state_key(self, observation) -> Hashable:
        """Hashable key for tabular lookups of an observation."""
        return tuple(np.round(np.asarray(observation, dtype=np.float64), 6).tolist())

    @abstractmethod
    def _reset(self, rng) -> np.ndarray:
        ...

    @abstractmethod
    def _transition(self, action: int, rng) -> Any:
        """(observation, reward, terminal, success) after one step"""
