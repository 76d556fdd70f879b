import logging
from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np

from src.baseline import Baseline
from src.envs import Environment
from src.errors import ContractError
from src.numerics import AdamState, MlpParams, Rng, adam_step, clip_grad_norm, count_parameters, forward
from src.replay import ReplayBuffer, Transition
from src.satcore import LearnerState, SatConfig, sat_loss_and_grad, sync_target
from .exploration import LinearSchedule, epsilon_greedy

logger = logging.getLogger(__name__)

CHECKPOINT_SCHEMA_VERSION = 1


class LearnerStreams(NamedTuple):
    exploration: Rng
    env: Rng
    sampling: Rng


class EpisodeRecord(NamedTuple):
    learner: int
    episode_return: float
    length: int
    success: bool


class WeakEnsemble:
    """K small satisficing Q-learners sharing one baseline, written after each round"""

    def __init__(self, learners: List[LearnerState], baseline: Baseline, sat_cfg: SatConfig,
                 envs: List[Environment], streams: List[LearnerStreams], baseline_rng: Rng,
                 epsilon_schedule: LinearSchedule, batch_size: int = 64, learning_starts: int = 64,
                 grad_clip: Optional[float] = 10.0):
        if not learners:
            raise ContractError("An ensemble needs at least one learner")
        dims = {(l.online.input_dim, l.online.output_dim) for l in learners}
        if len(dims) != 1:
            raise ContractError(f"Learners disagree on input/output dimensions: {sorted(dims)}")
        if not (len(envs) == len(streams) == len(learners)):
            raise ContractError("Need one environment and one rng stream set per learner")
        self.learners = learners
        self.baseline = baseline
        self.sat_cfg = sat_cfg
        self.envs = envs
        self.streams = streams
        self.baseline_rng = baseline_rng
        self.epsilon_schedule = epsilon_schedule
        self.batch_size = batch_size
        self.learning_starts = learning_starts
        self.grad_clip = grad_clip
        self.episodes = 0
        self.history: List[EpisodeRecord] = []
        self.last_losses: List[float] = [float("nan")] * len(learners)

    @classmethod
    def build(cls, env_factory: Callable[[], Environment], k: int, hidden: Sequence[int],
              baseline: Baseline, sat_cfg: SatConfig, rng: Rng, lr: float = 1e-3,
              buffer_capacity: int = 10_000, batch_size: int = 64, learning_starts: int = 64,
              grad_clip: Optional[float] = 10.0,
              epsilon_schedule: Optional[LinearSchedule] = None) -> "WeakEnsemble":
        envs = [env_factory() for _ in range(k)]
        layers = [envs[0].observation_dim, *hidden, envs[0].n_actions]
        learners, streams = [], []
        for i in range(k):
            learner_rng = rng.derive("learner").derive_index(i)
            online = MlpParams.initialize(layers, learner_rng.derive("init"))
            learners.append(LearnerState(online, AdamState(online, lr=lr), ReplayBuffer(buffer_capacity)))
            streams.append(LearnerStreams(learner_rng.derive("exploration"), learner_rng.derive("env"),
                                          learner_rng.derive("sampling")))
        return cls(learners, baseline, sat_cfg, envs, streams, rng.derive("baseline"),
                   epsilon_schedule or LinearSchedule(), batch_size, learning_starts, grad_clip)

    @property
    def k(self) -> int:
        return len(self.learners)

    @property
    def env_steps(self) -> int:
        return sum(l.env_steps for l in self.learners)

    def _update(self, i: int) -> float:
        learner = self.learners[i]
        batch = learner.buffer.sample_batch(self.batch_size, self.streams[i].sampling)
        loss, grads = sat_loss_and_grad(batch, learner, self.baseline, self.sat_cfg)
        adam_step(learner.online, clip_grad_norm(grads, self.grad_clip), learner.opt)
        learner.updates += 1
        return loss

    def _run_learner_episode(self, i: int):
        learner, env, streams = self.learners[i], self.envs[i], self.streams[i]
        state = env.reset(streams.env)
        visited, total, length, success = [], 0.0, 0, False
        while True:
            learner.epsilon = self.epsilon_schedule(learner.env_steps)
            action = epsilon_greedy(learner.online, state, learner.epsilon, streams.exploration, env.n_actions)
            result = env.step(action, streams.env)
            # truncation is not terminal: the target still bootstraps
            terminal = result.done and not result.truncated
            learner.buffer.push(Transition(state, action, result.reward, result.next_state, terminal))
            learner.env_steps += 1
            visited.append(state)
            total += result.reward
            length += 1
            if len(learner.buffer) >= self.learning_starts:
                self.last_losses[i] = self._update(i)
            if result.done:
                success = result.success
                break
            state = result.next_state
        return total, visited, length, success

    def phase1_episode(self) -> List[float]:
        """Every learner plays and trains on one episode, then the baseline is updated"""
        self.episodes += 1
        returns, visits = [], []
        for i, learner in enumerate(self.learners):
            total, visited, length, success = self._run_learner_episode(i)
            if self.episodes % self.sat_cfg.target_sync_interval == 0:
                sync_target(learner)
            returns.append(total)
            visits.append(visited)
            self.history.append(EpisodeRecord(i, total, length, success))
        for visited, total in zip(visits, returns):
            self.baseline.observe_episode(visited, total, rng=self.baseline_rng)
        logger.debug(f"Phase 1 episode {self.episodes}: returns {[round(r, 3) for r in returns]}, "
                     f"losses {[round(l, 4) for l in self.last_losses]}")
        return returns

    def q_ens(self, state) -> np.ndarray:
        """Mean of the online networks' Q-values."""
        return np.mean([forward(l.online, state) for l in self.learners], axis=0)

    def diversity(self, states) -> float:
        """Mean across-learner population std of Q-values over a batch of states"""
        states = np.atleast_2d(states)
        if len(states) == 0:
            raise ContractError("Diversity batch is empty")
        stacked = np.stack([forward(l.online, states) for l in self.learners])
        return float(stacked.std(axis=0).mean())

    @property
    def parameter_count(self) -> int:
        return sum(count_parameters(l.online) for l in self.learners)

    def checksums(self) -> List[str]:
        return [l.online.checksum() for l in self.learners]

    def checkpoint(self) -> dict:
        """End-of-Phase-1 document: learners, baseline, buffer sizes and rng stream states"""
        return {
            "schema_version": CHECKPOINT_SCHEMA_VERSION,
            "episodes": self.episodes,
            "env_steps": self.env_steps,
            "learners": [l.to_dict() for l in self.learners],
            "baseline": self.baseline.to_dict(),
            "buffer_sizes": [len(l.buffer) for l in self.learners],
            "rng_states": [{name: getattr(s, name).get_state() for name in LearnerStreams._fields}
                           for s in self.streams],
            "baseline_rng_state": self.baseline_rng.get_state(),
        }
