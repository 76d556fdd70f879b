from .mlp import MlpParams, forward, backward, count_parameters, layer_sizes_for
from .optim import AdamState, adam_step, sgd_step, clip_grad_norm
from .rng import Rng
from .gradcheck import max_relative_error, random_gradient_check

__all__ = [
    "MlpParams", "forward", "backward", "count_parameters", "layer_sizes_for",
    "AdamState", "adam_step", "sgd_step", "clip_grad_norm",
    "Rng", "max_relative_error", "random_gradient_check",
]
