import math
from typing import List, NamedTuple, Optional, Union

import numpy as np

from src.errors import NumericError, ShapeError
from .targets import SatConfig


class TabularMDP(NamedTuple):
    """Finite MDP: P[s, a, s'] transition kernel and R[s, a] expected reward."""

    P: np.ndarray
    R: np.ndarray

    @property
    def n_states(self) -> int:
        return self.P.shape[0]

    @property
    def n_actions(self) -> int:
        return self.P.shape[1]


def random_mdp(n_states: int, n_actions: int, rng) -> TabularMDP:
    """Dirichlet(1, ..., 1) transition rows, rewards uniform in [-1, 1]."""
    P = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    R = rng.uniform(-1.0, 1.0, size=(n_states, n_actions))
    return TabularMDP(P, R)


def tabular_sat_backup(mdp: TabularMDP, Q: np.ndarray, B: Union[float, np.ndarray],
                       cfg: SatConfig) -> np.ndarray:
    """Exact expectation form of the satisficing Bellman operator."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.shape != (mdp.n_states, mdp.n_actions):
        raise ShapeError(f"Q shape {Q.shape} != {(mdp.n_states, mdp.n_actions)}")
    v = Q.max(axis=1)
    if cfg.clip_targets:
        v = np.minimum(v, np.broadcast_to(np.asarray(B, dtype=np.float64), v.shape) + cfg.margin)
    return mdp.R + cfg.gamma * (mdp.P @ v)


def iterations_bound(initial_gap: float, gamma: float, tol: float = 1e-10) -> int:
    if initial_gap <= tol or gamma == 0.0:
        return 1
    return int(math.ceil(math.log(tol / initial_gap) / math.log(gamma))) + 1


class FixedPointResult(NamedTuple):
    Q: np.ndarray
    iterations: int
    gaps: List[float]


def iterate_sat_backup(mdp: TabularMDP, B, cfg: SatConfig, Q0: Optional[np.ndarray] = None,
                       tol: float = 1e-10, max_iterations: Optional[int] = None) -> FixedPointResult:
    Q = np.zeros((mdp.n_states, mdp.n_actions)) if Q0 is None else np.asarray(Q0, dtype=np.float64)
    gaps: List[float] = []
    limit = max_iterations or 1_000_000
    for i in range(1, limit + 1):
        new_Q = tabular_sat_backup(mdp, Q, B, cfg)
        gap = float(np.max(np.abs(new_Q - Q)))
        gaps.append(gap)
        Q = new_Q
        if gap < tol:
            return FixedPointResult(Q, i, gaps)
    raise NumericError(f"Satisficing backup did not converge within {limit} iterations")
