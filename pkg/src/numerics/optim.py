from typing import List, Optional, Tuple

import numpy as np

from src.errors import NumericError, ShapeError
from .mlp import MlpParams


class AdamState:
    """First/second moment accumulators shaped like the parameters they drive."""

    def __init__(self, params: MlpParams, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0 or eps <= 0 or not (0 < beta1 < 1) or not (0 < beta2 < 1):
            raise ValueError(f"Invalid Adam hyperparameters: lr={lr}, beta1={beta1}, beta2={beta2}, eps={eps}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m: List[np.ndarray] = [np.zeros_like(a) for a in params.arrays()]
        self.v: List[np.ndarray] = [np.zeros_like(a) for a in params.arrays()]

    def to_dict(self) -> dict:
        return {
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps,
            "step": self.step,
            "m": [a.tolist() for a in self.m],
            "v": [a.tolist() for a in self.v],
        }

    @classmethod
    def from_dict(cls, data: dict, params: MlpParams) -> "AdamState":
        state = cls(params, lr=data["lr"], beta1=data["beta1"], beta2=data["beta2"], eps=data["eps"])
        m = [np.asarray(a, dtype=np.float64) for a in data["m"]]
        v = [np.asarray(a, dtype=np.float64) for a in data["v"]]
        if [a.shape for a in m] != [a.shape for a in state.m] or [a.shape for a in v] != [a.shape for a in state.v]:
            raise ShapeError("Adam moments do not match the parameter shapes")
        state.step, state.m, state.v = int(data["step"]), m, v
        return state


def _check_grads(params: MlpParams, grads: MlpParams):
    if grads.layer_sizes != params.layer_sizes:
        raise ShapeError(f"Gradient layers {grads.layer_sizes} != parameter layers {params.layer_sizes}")
    if not grads.is_finite():
        raise NumericError("NaN or Inf in gradient")


def clip_grad_norm(grads: MlpParams, max_norm: Optional[float]) -> MlpParams:
    if max_norm is None:
        return grads
    norm = float(np.sqrt(sum(float(np.sum(a * a)) for a in grads.arrays())))
    if norm <= max_norm:
        return grads
    scale = max_norm / (norm + 1e-12)
    return MlpParams(grads.layer_sizes,
                     [w * scale for w in grads.weights],
                     [b * scale for b in grads.biases],
                     grads.activations)


def adam_step(params: MlpParams, grads: MlpParams, opt: AdamState) -> Tuple[MlpParams, AdamState]:
    """One Adam update, applied in place; returns (params, opt) for chaining."""
    _check_grads(params, grads)
    opt.step += 1
    t = opt.step
    correction1 = 1.0 - opt.beta1 ** t
    correction2 = 1.0 - opt.beta2 ** t
    for p, g, m, v in zip(params.arrays(), grads.arrays(), opt.m, opt.v):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * g * g
        p -= opt.lr * (m / correction1) / (np.sqrt(v / correction2) + opt.eps)
    if not params.is_finite():
        raise NumericError("Parameters became non-finite after Adam step")
    return params, opt


def sgd_step(params: MlpParams, grads: MlpParams, lr: float) -> MlpParams:
    _check_grads(params, grads)
    for p, g in zip(params.arrays(), grads.arrays()):
        p -= lr * g
    return params
