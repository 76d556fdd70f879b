from typing import List, NamedTuple

import numpy as np

from src.ensemble import greedy_action
from src.envs import Environment
from src.numerics import MlpParams, Rng


class EvaluationResult(NamedTuple):
    mean: float
    std: float
    returns: List[float]
    success_rate: float


def evaluate_policy(net: MlpParams, env: Environment, episodes: int, rng: Rng) -> EvaluationResult:
    """Greedy rollouts, no exploration."""
    returns, successes = [], 0
    for _ in range(episodes):
        state = env.reset(rng)
        total = 0.0
        while True:
            result = env.step(greedy_action(net, state), rng)
            total += result.reward
            if result.done:
                successes += int(result.success)
                break
            state = result.next_state
        returns.append(total)
    arr = np.asarray(returns)
    return EvaluationResult(float(arr.mean()), float(arr.std()), returns, successes / episodes)
