import math
from typing import Iterator, List, NamedTuple, Optional, Sequence

import numpy as np

from src.errors import ContractError


class Transition(NamedTuple):
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool


class TransitionBatch(NamedTuple):
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    def transitions(self) -> List[Transition]:
        return [Transition(self.states[i], int(self.actions[i]), float(self.rewards[i]),
                           self.next_states[i], bool(self.dones[i])) for i in range(len(self))]

    @classmethod
    def from_transitions(cls, transitions: Sequence[Transition]) -> "TransitionBatch":
        if not transitions:
            raise ContractError("Cannot build a batch from zero transitions")
        return cls(np.stack([np.asarray(t.state, dtype=np.float64) for t in transitions]),
                   np.array([t.action for t in transitions], dtype=np.int64),
                   np.array([t.reward for t in transitions], dtype=np.float64),
                   np.stack([np.asarray(t.next_state, dtype=np.float64) for t in transitions]),
                   np.array([t.done for t in transitions], dtype=bool))


class ReplayBuffer:
    """Bounded FIFO of transitions stored in preallocated ring arrays."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError(f"Replay capacity must be positive, got {capacity}")
        self.capacity = int(capacity)
        self.inserted = 0
        self._dim: Optional[int] = None
        self._states = self._next_states = None
        self._actions = np.zeros(self.capacity, dtype=np.int64)
        self._rewards = np.zeros(self.capacity, dtype=np.float64)
        self._dones = np.zeros(self.capacity, dtype=bool)

    def __len__(self) -> int:
        return min(self.inserted, self.capacity)

    def _allocate(self, dim: int):
        self._dim = dim
        self._states = np.zeros((self.capacity, dim))
        self._next_states = np.zeros((self.capacity, dim))

    def push(self, t: Transition):
        state = np.asarray(t.state, dtype=np.float64).ravel()
        next_state = np.asarray(t.next_state, dtype=np.float64).ravel()
        if self._dim is None:
            self._allocate(state.size)
        if state.size != self._dim or next_state.size != self._dim:
            raise ContractError(f"Transition dimension {state.size}/{next_state.size} != buffer dimension {self._dim}")
        if not math.isfinite(t.reward):
            raise ContractError(f"Non-finite reward {t.reward}")
        slot = self.inserted % self.capacity
        self._states[slot] = state
        self._next_states[slot] = next_state
        self._actions[slot] = int(t.action)
        self._rewards[slot] = float(t.reward)
        self._dones[slot] = bool(t.done)
        self.inserted += 1

    def _ordered_slots(self) -> np.ndarray:
        """Slots, oldest first"""
        size = len(self)
        start = self.inserted - size
        return (start + np.arange(size)) % self.capacity

    def _gather(self, slots: np.ndarray) -> TransitionBatch:
        return TransitionBatch(self._states[slots].copy(), self._actions[slots].copy(),
                               self._rewards[slots].copy(), self._next_states[slots].copy(),
                               self._dones[slots].copy())

    def sample_batch(self, batch_size: int, rng) -> TransitionBatch:
        """`batch_size` uniform draws with replacement, as stacked arrays."""
        if len(self) == 0:
            raise ContractError("Cannot sample from an empty replay buffer")
        picks = rng.integers(0, len(self), size=batch_size)
        return self._gather(self._ordered_slots()[picks])

    def sample(self, batch_size: int, rng) -> List[Transition]:
        return self.sample_batch(batch_size, rng).transitions()

    def contents(self) -> TransitionBatch:
        if len(self) == 0:
            raise ContractError("Replay buffer is empty")
        return self._gather(self._ordered_slots())

    def __iter__(self) -> Iterator[Transition]:
        if len(self) == 0:
            return iter(())
        return iter(self.contents().transitions())


class PooledReplay:
    """Immutable snapshot of several buffers, sampled uniformly per element."""

    def __init__(self, batch: TransitionBatch, sources: Sequence[int]):
        self._batch = batch
        self.sources = tuple(sources)
        for array in batch:
            array.setflags(write=False)

    def __len__(self) -> int:
        return len(self._batch)

    @property
    def states(self) -> np.ndarray:
        return self._batch.states

    def sample_batch(self, batch_size: int, rng) -> TransitionBatch:
        picks = rng.integers(0, len(self), size=batch_size)
        b = self._batch
        return TransitionBatch(b.states[picks], b.actions[picks], b.rewards[picks],
                               b.next_states[picks], b.dones[picks])

    def sample(self, batch_size: int, rng) -> List[Transition]:
        return self.sample_batch(batch_size, rng).transitions()

    def sample_states(self, batch_size: int, rng) -> np.ndarray:
        return self._batch.states[rng.integers(0, len(self), size=batch_size)]


def pool(buffers: Sequence[ReplayBuffer]) -> PooledReplay:
    """Snapshot the union of `buffers`; later pushes do not show up in the pool."""
    filled = [b for b in buffers if len(b) > 0]
    if not filled:
        raise ContractError("Cannot pool: every buffer is empty")
    parts = [b.contents() for b in filled]
    merged = TransitionBatch(*(np.concatenate([getattr(p, field) for p in parts])
                               for field in TransitionBatch._fields))
    return PooledReplay(merged, [len(b) for b in filled])
