from typing import Optional

import numpy as np

from .base import Environment, NoiseConfig

DT = 0.2
LINK_LENGTH_1 = 1.0
LINK_MASS_1 = 1.0
LINK_MASS_2 = 1.0
LINK_COM_1 = 0.5
LINK_COM_2 = 0.5
LINK_MOI = 1.0
MAX_VEL_1 = 4 * np.pi
MAX_VEL_2 = 9 * np.pi
GRAVITY = 9.8
TORQUES = (-1.0, 0.0, 1.0)


def _derivatives(s: np.ndarray, torque: float) -> np.ndarray:
    m1, m2 = LINK_MASS_1, LINK_MASS_2
    l1, lc1, lc2 = LINK_LENGTH_1, LINK_COM_1, LINK_COM_2
    i1 = i2 = LINK_MOI
    theta1, theta2, dtheta1, dtheta2 = s
    d1 = m1 * lc1 ** 2 + m2 * (l1 ** 2 + lc2 ** 2 + 2 * l1 * lc2 * np.cos(theta2)) + i1 + i2
    d2 = m2 * (lc2 ** 2 + l1 * lc2 * np.cos(theta2)) + i2
    phi2 = m2 * lc2 * GRAVITY * np.cos(theta1 + theta2 - np.pi / 2.0)
    phi1 = (-m2 * l1 * lc2 * dtheta2 ** 2 * np.sin(theta2)
            - 2 * m2 * l1 * lc2 * dtheta2 * dtheta1 * np.sin(theta2)
            + (m1 * lc1 + m2 * l1) * GRAVITY * np.cos(theta1 - np.pi / 2.0)
            + phi2)
    ddtheta2 = ((torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 ** 2 * np.sin(theta2) - phi2)
                / (m2 * lc2 ** 2 + i2 - d2 ** 2 / d1))
    ddtheta1 = -(d2 * ddtheta2 + phi1) / d1
    return np.array([dtheta1, dtheta2, ddtheta1, ddtheta2])


def rk4_step(s: np.ndarray, torque: float, dt: float = DT) -> np.ndarray:
    k1 = _derivatives(s, torque)
    k2 = _derivatives(s + dt / 2.0 * k1, torque)
    k3 = _derivatives(s + dt / 2.0 * k2, torque)
    k4 = _derivatives(s + dt * k3, torque)
    return s + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _wrap(angle: float) -> float:
    return float((angle + np.pi) % (2 * np.pi) - np.pi)


def tip_height(s: np.ndarray) -> float:
    return float(-np.cos(s[0]) - np.cos(s[1] + s[0]))


class Acrobot(Environment):
    """Two-link swing-up; reward -1 per step until the tip clears one link length above the pivot."""

    name = "acrobot"
    observation_dim = 6
    n_actions = 3
    return_floor = -500.0

    def __init__(self, noise: Optional[NoiseConfig] = None, max_steps: int = 500,
                 reference_return: float = -100.0):
        super().__init__(noise)
        self.max_steps = max_steps
        self.return_floor = -float(max_steps)
        self.reference_return = reference_return
        self.state = np.zeros(4)

    @property
    def optimal_reference(self) -> float:
        return self.reference_return

    def observe(self) -> np.ndarray:
        theta1, theta2, dtheta1, dtheta2 = self.state
        return np.array([np.cos(theta1), np.sin(theta1), np.cos(theta2), np.sin(theta2), dtheta1, dtheta2])

    def _reset(self, rng) -> np.ndarray:
        self.state = rng.uniform(-0.1, 0.1, size=4)
        return self.observe()

    def _transition(self, action: int, rng):
        s = rk4_step(self.state, TORQUES[action])
        s[0] = _wrap(s[0])
        s[1] = _wrap(s[1])
        s[2] = np.clip(s[2], -MAX_VEL_1, MAX_VEL_1)
        s[3] = np.clip(s[3], -MAX_VEL_2, MAX_VEL_2)
        self.state = s
        terminal = tip_height(s) > LINK_LENGTH_1
        return self.observe(), 0.0 if terminal else -1.0, bool(terminal), bool(terminal)
