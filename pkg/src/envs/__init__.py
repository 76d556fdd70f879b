from .base import Environment, EnvStepResult, NoiseConfig
from .gridworld import GridWorld, GridWorldConfig, gridworld_optimal, transition_model
from .cartpole import CartPole, cartpole_dynamics
from .acrobot import Acrobot
from .registry import EnvSpec, make_env

__all__ = [
    "Environment", "EnvStepResult", "NoiseConfig",
    "GridWorld", "GridWorldConfig", "gridworld_optimal", "transition_model",
    "CartPole", "cartpole_dynamics", "Acrobot", "EnvSpec", "make_env",
]
