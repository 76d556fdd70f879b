from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .acrobot import Acrobot
from .base import Environment, NoiseConfig
from .cartpole import CartPole
from .gridworld import GridWorld, GridWorldConfig

# Per-environment defaults: training budget and whether states are discrete
ENV_DEFAULTS = {
    "gridworld": {"total_steps": 10_000, "discrete_states": True},
    "cartpole": {"total_steps": 20_000, "discrete_states": False},
    "acrobot": {"total_steps": 20_000, "discrete_states": False},
}


class EnvSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Literal["gridworld", "cartpole", "acrobot"] = "cartpole"
    action_noise_prob: float = Field(0.0, ge=0.0, le=1.0)
    max_steps: Optional[int] = Field(None, ge=1)
    # GridWorld only
    size: int = Field(8, ge=2)
    slip_prob: float = Field(0.2, ge=0.0, lt=1.0)
    step_penalty: float = -0.01
    goal_reward: float = 1.0
    encoding: Literal["one_hot", "index"] = "one_hot"
    # Acrobot only
    reference_return: float = -100.0

    @property
    def default_total_steps(self) -> int:
        return ENV_DEFAULTS[self.name]["total_steps"]

    @property
    def discrete_states(self) -> bool:
        return ENV_DEFAULTS[self.name]["discrete_states"]

    def tag(self) -> str:
        if self.name == "gridworld":
            return f"gridworld-slip{self.slip_prob:g}"
        if self.action_noise_prob > 0:
            return f"{self.name}-noise{self.action_noise_prob:g}"
        return self.name

    def gridworld_config(self) -> GridWorldConfig:
        return GridWorldConfig(size=self.size, slip_prob=self.slip_prob, step_penalty=self.step_penalty,
                               goal_reward=self.goal_reward, max_steps=self.max_steps or 200)


def make_env(spec: EnvSpec, action_noise_prob: Optional[float] = None) -> Environment:
    """Build an environment; `action_noise_prob` overrides the EnvSpec noise level."""
    noise = NoiseConfig(action_noise_prob=spec.action_noise_prob if action_noise_prob is None
                        else action_noise_prob)
    if spec.name == "gridworld":
        return GridWorld(spec.gridworld_config(), noise=noise, encoding=spec.encoding)
    if spec.name == "cartpole":
        return CartPole(noise=noise, max_steps=spec.max_steps or 500)
    if spec.name == "acrobot":
        return Acrobot(noise=noise, max_steps=spec.max_steps or 500, reference_return=spec.reference_return)
    raise ValueError(f"Unsupported environment: {spec.name}")
