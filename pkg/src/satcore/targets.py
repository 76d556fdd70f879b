from typing import Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.baseline import Baseline
from src.errors import ContractError, NumericError
from src.numerics import AdamState, MlpParams, backward, forward
from src.replay import ReplayBuffer, Transition, TransitionBatch


class SatConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    margin: float = Field(0.5, ge=0.0)
    hinge_weight: float = Field(0.1, ge=0.0)
    gamma: float = Field(0.99, ge=0.0, lt=1.0)
    target_sync_interval: int = Field(10, ge=1)
    # as_printed penalizes Q below B+m; as_prose penalizes Q above it
    hinge_direction: Literal["as_printed", "as_prose"] = "as_printed"
    # False gives the plain max target (the no-satisficing ablation)
    clip_targets: bool = True


class LearnerState:
    """One weak learner: online/target nets, optimizer, private replay, exploration rate."""

    def __init__(self, online: MlpParams, opt: AdamState, buffer: ReplayBuffer, epsilon: float = 1.0):
        self.online = online
        self.target = online.copy()
        self.opt = opt
        self.buffer = buffer
        self.epsilon = epsilon
        self.env_steps = 0
        self.updates = 0
        self.syncs = 0

    def to_dict(self) -> dict:
        return {
            "online": self.online.to_dict(),
            "target": self.target.to_dict(),
            "optimizer": self.opt.to_dict(),
            "buffer_size": len(self.buffer),
            "epsilon": self.epsilon,
            "env_steps": self.env_steps,
            "updates": self.updates,
            "syncs": self.syncs,
        }


def _as_batch(batch: Union[TransitionBatch, Transition, list]) -> TransitionBatch:
    if isinstance(batch, TransitionBatch):
        return batch
    if isinstance(batch, Transition):
        return TransitionBatch.from_transitions([batch])
    return TransitionBatch.from_transitions(list(batch))


def sat_targets(batch: TransitionBatch, target_net: MlpParams, baseline: Baseline, cfg: SatConfig) -> np.ndarray:
    """r + gamma * min(max_a' Q_target(s', a'), B(s') + m), or r alone on terminal transitions."""
    next_q = forward(target_net, batch.next_states)
    if not np.all(np.isfinite(next_q)):
        raise NumericError("Target network produced non-finite Q-values")
    bootstrap = next_q.max(axis=1)
    if cfg.clip_targets:
        bootstrap = np.minimum(bootstrap, baseline.query_batch(batch.next_states) + cfg.margin)
    return batch.rewards + cfg.gamma * np.where(batch.dones, 0.0, bootstrap)


def sat_target(t: Transition, target_net: MlpParams, baseline: Baseline, cfg: SatConfig) -> float:
    return float(sat_targets(_as_batch(t), target_net, baseline, cfg)[0])


def sat_loss_and_grad(batch, learner: LearnerState, baseline: Baseline,
                      cfg: SatConfig) -> Tuple[float, MlpParams]:
    """Mean of squared TD error to the satisficing target plus the weighted squared hinge.

    Targets and thresholds are constants; gradient flows only through Q(s, a).
    """
    batch = _as_batch(batch)
    n = len(batch)
    if n == 0:
        raise ContractError("Loss batch is empty")
    rows = np.arange(n)
    q_all = forward(learner.online, batch.states)
    q_sa = q_all[rows, batch.actions]
    td = q_sa - sat_targets(batch, learner.target, baseline, cfg)

    threshold = baseline.query_batch(batch.states) + cfg.margin
    if cfg.hinge_direction == "as_printed":
        hinge = np.maximum(threshold - q_sa, 0.0)
        d_hinge = -2.0 * cfg.hinge_weight * hinge
    else:
        hinge = np.maximum(q_sa - threshold, 0.0)
        d_hinge = 2.0 * cfg.hinge_weight * hinge

    loss = float(np.mean(td ** 2 + cfg.hinge_weight * hinge ** 2))
    if not np.isfinite(loss):
        raise NumericError("Satisficing loss is not finite")
    grad_out = np.zeros_like(q_all)
    grad_out[rows, batch.actions] = (2.0 * td + d_hinge) / n
    return loss, backward(learner.online, batch.states, grad_out)


def sync_target(learner: LearnerState):
    learner.target = learner.online.copy()
    learner.syncs += 1
