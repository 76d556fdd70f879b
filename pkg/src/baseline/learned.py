import logging
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from src.errors import ContractError, NumericError
from src.numerics import AdamState, MlpParams, adam_step, backward, forward
from .episodic import Baseline

logger = logging.getLogger(__name__)


class LearnedBaseline(Baseline):
    """Regression network B_phi(s) fit to Monte Carlo episode returns."""

    def __init__(self, state_dim: int, rng, hidden: Sequence[int] = (32,), lr: float = 1e-3,
                 capacity: int = 5000, batch_size: int = 64):
        self.net = MlpParams.initialize([state_dim, *hidden, 1], rng)
        self.opt = AdamState(self.net, lr=lr)
        self.capacity = capacity
        self.batch_size = batch_size
        self._states = np.zeros((capacity, state_dim))
        self._returns = np.zeros(capacity)
        self._inserted = 0

    def query(self, state) -> float:
        return float(forward(self.net, state)[0])

    def query_batch(self, states) -> np.ndarray:
        return forward(self.net, np.atleast_2d(states))[:, 0]

    def train_learned(self, states, returns) -> float:
        """One Adam step on mean squared error; returns the pre-step loss."""
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        targets = np.asarray(returns, dtype=np.float64).ravel()
        if len(targets) == 0:
            raise ContractError("Baseline training batch is empty")
        residual = forward(self.net, states)[:, 0] - targets
        loss = float(np.mean(residual ** 2))
        if not np.isfinite(loss):
            raise NumericError("Baseline loss is not finite")
        grad_out = (2.0 / len(targets)) * residual[:, None]
        adam_step(self.net, backward(self.net, states, grad_out), self.opt)
        return loss

    def _record(self, visited_states: Iterable, episode_return: float):
        for s in visited_states:
            slot = self._inserted % self.capacity
            self._states[slot] = np.asarray(s, dtype=np.float64).ravel()
            self._returns[slot] = episode_return
            self._inserted += 1

    def observe_episode(self, visited_states: Iterable, episode_return: float, rng=None) -> Optional[float]:
        self._record(visited_states, episode_return)
        size = min(self._inserted, self.capacity)
        if size == 0 or rng is None:
            return None
        picks = rng.integers(0, size, size=self.batch_size)
        loss = self.train_learned(self._states[picks], self._returns[picks])
        logger.debug(f"Baseline regression loss {loss:.4f} over {size} stored states")
        return loss

    @property
    def parameter_count(self) -> int:
        return int(self.net.ravel().size)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "learned", "net": self.net.to_dict(), "stored": min(self._inserted, self.capacity)}
