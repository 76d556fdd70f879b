import math
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Hashable, Iterable, Optional

import numpy as np


class Baseline(ABC):
    """Aspiration level B(s): a per-state value the agent considers good enough."""

    @abstractmethod
    def query(self, state) -> float:
        ...

    def query_batch(self, states) -> np.ndarray:
        return np.array([self.query(s) for s in np.atleast_2d(states)])

    @abstractmethod
    def observe_episode(self, visited_states: Iterable, episode_return: float, rng=None) -> Optional[float]:
        """Fold one finished episode into the baseline."""

    @property
    def parameter_count(self) -> int:
        return 0

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...


def _default_key(state) -> Hashable:
    return tuple(np.round(np.asarray(state, dtype=np.float64).ravel(), 6).tolist())


class EpisodicBaseline(Baseline):
    """Per-state exponential moving average of episode returns."""

    def __init__(self, alpha: float = 0.99, default: float = 0.0,
                 key_fn: Optional[Callable[[Any], Hashable]] = None):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"Baseline decay must lie in [0, 1], got {alpha}")
        self.alpha = alpha
        self.default = default
        self.key_fn = key_fn or _default_key
        self.table: Dict[Hashable, float] = {}

    def query(self, state) -> float:
        return self.table.get(self.key_fn(state), self.default)

    def update_episodic(self, visited_states: Iterable, episode_return: float):
        if not math.isfinite(episode_return):
            raise ValueError(f"Episode return must be finite, got {episode_return}")
        # first visit only
        for key in dict.fromkeys(self.key_fn(s) for s in visited_states):
            current = self.table.get(key, self.default)
            self.table[key] = self.alpha * current + (1.0 - self.alpha) * episode_return

    def observe_episode(self, visited_states: Iterable, episode_return: float, rng=None) -> Optional[float]:
        self.update_episodic(visited_states, episode_return)
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": "episodic",
            "alpha": self.alpha,
            "default": self.default,
            "table": [[list(k) if isinstance(k, tuple) else k, v] for k, v in self.table.items()],
        }
