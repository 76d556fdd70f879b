import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.ensemble import LinearSchedule, epsilon_greedy
from src.envs import Environment
from src.errors import ContractError, NumericError
from src.numerics import AdamState, MlpParams, Rng, adam_step, backward, clip_grad_norm, forward
from src.replay import PooledReplay, ReplayBuffer, Transition, TransitionBatch
from src.satcore import sync_target

logger = logging.getLogger(__name__)


class StudentState:
    """The single network trained in Phase 2 (and by the DQN baselines)."""

    def __init__(self, online: MlpParams, opt: AdamState, buffer: ReplayBuffer):
        self.online = online
        self.target = online.copy()
        self.opt = opt
        self.buffer = buffer
        self.epsilon = 0.0
        self.env_steps = 0
        self.updates = 0
        self.syncs = 0

    @classmethod
    def create(cls, layer_sizes: Sequence[int], rng: Rng, lr: float = 1e-3,
               buffer_capacity: int = 20_000) -> "StudentState":
        online = MlpParams.initialize(layer_sizes, rng)
        return cls(online, AdamState(online, lr=lr), ReplayBuffer(buffer_capacity))


def dqn_targets(batch: TransitionBatch, target_net: MlpParams, gamma: float) -> np.ndarray:
    next_q = forward(target_net, batch.next_states).max(axis=1)
    return batch.rewards + gamma * np.where(batch.dones, 0.0, next_q)


def double_dqn_targets(batch: TransitionBatch, online: MlpParams, target_net: MlpParams,
                       gamma: float) -> np.ndarray:
    """Target net evaluates the online net's greedy next action."""
    chosen = forward(online, batch.next_states).argmax(axis=1)
    next_q = forward(target_net, batch.next_states)[np.arange(len(batch)), chosen]
    return batch.rewards + gamma * np.where(batch.dones, 0.0, next_q)


def td_loss_and_grad(batch: TransitionBatch, student: StudentState, gamma: float,
                     double: bool = True) -> Tuple[float, MlpParams]:
    n = len(batch)
    rows = np.arange(n)
    q_all = forward(student.online, batch.states)
    if double:
        targets = double_dqn_targets(batch, student.online, student.target, gamma)
    else:
        targets = dqn_targets(batch, student.target, gamma)
    td = q_all[rows, batch.actions] - targets
    loss = float(np.mean(td ** 2))
    if not np.isfinite(loss):
        raise NumericError("TD loss is not finite")
    grad_out = np.zeros_like(q_all)
    grad_out[rows, batch.actions] = 2.0 * td / n
    return loss, backward(student.online, batch.states, grad_out)


def distill(student: StudentState, pooled: PooledReplay, q_targets: Callable[[np.ndarray], np.ndarray],
            steps: int, rng: Rng, batch_size: int = 64, grad_clip: Optional[float] = 10.0) -> List[float]:
    """Regress the student onto `q_targets` (the ensemble mean) over pooled states.

    Returns the pre-step loss of every gradient step.
    """
    if len(pooled) == 0:
        raise ContractError("Distillation pool is empty")
    losses = []
    for _ in range(steps):
        states = pooled.sample_states(batch_size, rng)
        wanted = q_targets(states)
        diff = forward(student.online, states) - wanted
        loss = float(np.mean(diff ** 2))
        if not np.isfinite(loss):
            raise NumericError("Distillation loss is not finite")
        grads = backward(student.online, states, 2.0 * diff / diff.size)
        adam_step(student.online, clip_grad_norm(grads, grad_clip), student.opt)
        student.updates += 1
        losses.append(loss)
    if losses:
        logger.info(f"Distilled {steps} steps: loss {losses[0]:.5f} -> {losses[-1]:.5f}")
    return losses


def train_q_learning(student: StudentState, env: Environment, steps: int, rng: Rng, gamma: float,
                     schedule: LinearSchedule, double: bool = True, batch_size: int = 64,
                     learning_starts: int = 64, target_sync_interval: int = 10,
                     grad_clip: Optional[float] = 10.0) -> List[float]:
    """(Double-)DQN for exactly `steps` env steps; returns completed-episode returns.

    The target net syncs every `target_sync_interval` completed episodes.
    """
    exploration, env_rng, sampling = rng.derive("exploration"), rng.derive("env"), rng.derive("sampling")
    returns: List[float] = []
    episodes = 0
    taken = 0
    while taken < steps:
        state = env.reset(env_rng)
        total = 0.0
        while taken < steps:
            student.epsilon = schedule(taken)
            action = epsilon_greedy(student.online, state, student.epsilon, exploration, env.n_actions)
            result = env.step(action, env_rng)
            terminal = result.done and not result.truncated
            student.buffer.push(Transition(state, action, result.reward, result.next_state, terminal))
            student.env_steps += 1
            taken += 1
            total += result.reward
            if len(student.buffer) >= learning_starts:
                batch = student.buffer.sample_batch(batch_size, sampling)
                _, grads = td_loss_and_grad(batch, student, gamma, double)
                adam_step(student.online, clip_grad_norm(grads, grad_clip), student.opt)
                student.updates += 1
            if result.done:
                episodes += 1
                returns.append(total)
                if episodes % target_sync_interval == 0:
                    sync_target(student)
                logger.debug(f"Q-learning episode {episodes}: return {total:.3f}, epsilon {student.epsilon:.3f}")
                break
            state = result.next_state
    return returns


def polish(student: StudentState, env: Environment, steps: int, rng: Rng, gamma: float = 0.99,
           schedule: Optional[LinearSchedule] = None, **kwargs) -> List[float]:
    """Fine-tune a distilled student with Double DQN."""
    schedule = schedule or LinearSchedule(0.1, 0.05, max(steps // 2, 1))
    return train_q_learning(student, env, steps, rng, gamma, schedule, double=True, **kwargs)
