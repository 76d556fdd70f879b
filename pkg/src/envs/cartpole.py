import math
from typing import Optional

import numpy as np

from .base import Environment, NoiseConfig

GRAVITY = 9.8
CART_MASS = 1.0
POLE_MASS = 0.1
TOTAL_MASS = CART_MASS + POLE_MASS
HALF_LENGTH = 0.5
POLE_MASS_LENGTH = POLE_MASS * HALF_LENGTH
FORCE_MAG = 10.0
TAU = 0.02
THETA_LIMIT = 12 * 2 * math.pi / 360
X_LIMIT = 2.4


def cartpole_dynamics(state: np.ndarray, action: int) -> np.ndarray:
    """One explicit-Euler step of the pole-on-cart system."""
    x, x_dot, theta, theta_dot = state
    force = FORCE_MAG if action == 1 else -FORCE_MAG
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    temp = (force + POLE_MASS_LENGTH * theta_dot ** 2 * sin_t) / TOTAL_MASS
    theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
        HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos_t ** 2 / TOTAL_MASS))
    x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS
    return np.array([
        x + TAU * x_dot,
        x_dot + TAU * x_acc,
        theta + TAU * theta_dot,
        theta_dot + TAU * theta_acc,
    ])


class CartPole(Environment):
    name = "cartpole"
    observation_dim = 4
    n_actions = 2
    return_floor = 0.0

    def __init__(self, noise: Optional[NoiseConfig] = None, max_steps: int = 500):
        super().__init__(noise)
        self.max_steps = max_steps
        self.state = np.zeros(4)

    @property
    def optimal_reference(self) -> float:
        return float(self.max_steps)

    def _reset(self, rng) -> np.ndarray:
        self.state = rng.uniform(-0.05, 0.05, size=4)
        return self.state.copy()

    def _transition(self, action: int, rng):
        self.state = cartpole_dynamics(self.state, action)
        x, _, theta, _ = self.state
        terminal = bool(abs(x) > X_LIMIT or abs(theta) > THETA_LIMIT)
        # Success means surviving to the cap, which the base class reports as truncation
        success = (not terminal) and self.steps >= self.max_steps
        return self.state.copy(), 1.0, terminal, success
