import numpy as np

from src.numerics import MlpParams, forward


class LinearSchedule:
    """Linear decay from `start` to `end` over `decay_steps`, then constant."""

    def __init__(self, start: float = 1.0, end: float = 0.05, decay_steps: int = 1):
        self.start = start
        self.end = end
        self.decay_steps = max(int(decay_steps), 1)

    def value(self, step: int) -> float:
        frac = min(max(step, 0) / self.decay_steps, 1.0)
        return self.start + frac * (self.end - self.start)

    def __call__(self, step: int) -> float:
        return self.value(step)


def greedy_action(net: MlpParams, state) -> int:
    return int(np.argmax(forward(net, state)))


def epsilon_greedy(net: MlpParams, state, epsilon: float, rng, n_actions: int) -> int:
    if rng.random() < epsilon:
        return int(rng.integers(n_actions))
    return greedy_action(net, state)
