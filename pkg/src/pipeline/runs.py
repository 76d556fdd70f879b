import logging
import time
from typing import List, NamedTuple, Optional

from src.baseline import Baseline, EpisodicBaseline, LearnedBaseline
from src.ensemble import LinearSchedule, WeakEnsemble
from src.envs import Environment, make_env
from src.errors import ContractError, SatEnqError
from src.numerics import MlpParams, Rng, count_parameters, layer_sizes_for
from src.replay import pool
from src.satcore import sync_target
from .config import RunConfig
from .evaluation import evaluate_policy
from .metrics import RunMetrics, failure_threshold, is_failure
from .student import StudentState, distill, polish, train_q_learning

logger = logging.getLogger(__name__)


class TrainingOutcome(NamedTuple):
    policy: MlpParams
    metrics: RunMetrics
    phase1_checkpoint: Optional[dict] = None


def make_baseline(cfg: RunConfig, env: Environment, rng: Rng) -> Baseline:
    kind = cfg.baseline_kind
    if kind == "auto":
        kind = "episodic" if cfg.env.discrete_states else "learned"
    if kind == "episodic":
        return EpisodicBaseline(alpha=cfg.baseline_alpha, key_fn=env.state_key)
    return LearnedBaseline(env.observation_dim, rng, hidden=cfg.baseline_hidden, lr=cfg.learning_rate,
                           capacity=cfg.baseline_capacity, batch_size=cfg.batch_size)


def _base_metrics(cfg: RunConfig, env: Environment) -> RunMetrics:
    ref, floor = env.optimal_reference, env.return_floor
    return RunMetrics(seed=cfg.seed, algorithm=cfg.algorithm, label=cfg.display_label, env=cfg.env.tag(),
                      config_hash=cfg.config_hash(), optimal_reference=ref,
                      failure_threshold=failure_threshold(ref, floor))


def train_sat_enq(cfg: RunConfig) -> TrainingOutcome:
    """Phase 1 (satisficing weak learners) then Phase 2 (distill, polish)."""
    cfg = cfg.effective()
    master = Rng(cfg.seed)
    template_env = make_env(cfg.env)
    metrics = _base_metrics(cfg, template_env)
    started = time.perf_counter()

    baseline = make_baseline(cfg, template_env, master.derive("baseline_init"))
    phase1_budget = int(cfg.phase1_fraction * cfg.budget)
    per_learner = max(phase1_budget // cfg.k, 1)
    schedule = LinearSchedule(cfg.epsilon_start, cfg.epsilon_end, int(cfg.epsilon_decay_fraction * per_learner))
    ensemble = WeakEnsemble.build(lambda: make_env(cfg.env), cfg.k, cfg.weak_hidden, baseline, cfg.sat,
                                  master.derive("phase1"), lr=cfg.learning_rate,
                                  buffer_capacity=cfg.weak_buffer_capacity, batch_size=cfg.batch_size,
                                  learning_starts=cfg.learning_starts, grad_clip=cfg.grad_clip,
                                  epsilon_schedule=schedule)

    phase1_returns: List[float] = []
    while True:
        if cfg.phase1_episodes is not None:
            if ensemble.episodes >= cfg.phase1_episodes:
                break
        elif ensemble.episodes > 0 and ensemble.env_steps >= phase1_budget:
            break
        phase1_returns.extend(ensemble.phase1_episode())
    logger.info(f"[{cfg.display_label} seed={cfg.seed}] Phase 1 done: {ensemble.episodes} episodes, "
                f"{ensemble.env_steps} env steps, {sum(l.syncs for l in ensemble.learners)} target syncs")

    frozen = ensemble.checksums()
    checkpoint = ensemble.checkpoint()
    pooled = pool([l.buffer for l in ensemble.learners])
    batch = pooled.sample_states(cfg.diversity_states, master.derive("diversity"))
    diversity = ensemble.diversity(batch)

    student = StudentState.create(layer_sizes_for(template_env.observation_dim, cfg.student_hidden,
                                                  template_env.n_actions),
                                  master.derive("student_init"), lr=cfg.learning_rate,
                                  buffer_capacity=cfg.polish_buffer_capacity)
    losses = distill(student, pooled, ensemble.q_ens, cfg.distill_steps, master.derive("distill"),
                     batch_size=cfg.batch_size, grad_clip=cfg.grad_clip)
    sync_target(student)

    polish_steps = cfg.polish_steps if cfg.polish_steps is not None else max(cfg.budget - ensemble.env_steps, 0)
    polish_returns: List[float] = []
    if polish_steps > 0:
        schedule = LinearSchedule(cfg.polish_epsilon_start, cfg.epsilon_end,
                                  int(cfg.epsilon_decay_fraction * polish_steps))
        polish_returns = polish(student, make_env(cfg.env), polish_steps, master.derive("polish"),
                                gamma=cfg.sat.gamma, schedule=schedule, batch_size=cfg.batch_size,
                                learning_starts=cfg.learning_starts,
                                target_sync_interval=cfg.sat.target_sync_interval,
                                grad_clip=cfg.grad_clip)
    if ensemble.checksums() != frozen:
        raise ContractError("Weak learner parameters changed after Phase 1")

    counts = {
        "weak": ensemble.parameter_count,
        "baseline": baseline.parameter_count,
        "student": count_parameters(student.online),
    }
    counts["total"] = sum(counts.values())
    metrics = metrics.model_copy(update={
        "train_returns": phase1_returns + polish_returns,
        "train_phases": ["phase1"] * len(phase1_returns) + ["polish"] * len(polish_returns),
        "env_steps": ensemble.env_steps + student.env_steps,
        "wall_time": time.perf_counter() - started,
        "parameter_counts": counts,
        "params_ratio": counts["total"] / counts["student"],
        "diversity": diversity,
        "phase1_episodes": ensemble.episodes,
        "distill_loss_first": losses[0] if losses else None,
        "distill_loss_last": losses[-1] if losses else None,
    })
    return TrainingOutcome(student.online, metrics, checkpoint)


def train_baseline(cfg: RunConfig) -> TrainingOutcome:
    """A single student-sized network trained with DQN or Double DQN for the whole budget."""
    cfg = cfg.effective()
    if cfg.algorithm not in ("dqn", "double_dqn"):
        raise ContractError(f"train_baseline does not handle algorithm {cfg.algorithm}")
    master = Rng(cfg.seed)
    env = make_env(cfg.env)
    metrics = _base_metrics(cfg, env)
    started = time.perf_counter()
    student = StudentState.create(layer_sizes_for(env.observation_dim, cfg.student_hidden, env.n_actions),
                                  master.derive("student_init"), lr=cfg.learning_rate,
                                  buffer_capacity=cfg.polish_buffer_capacity)
    schedule = LinearSchedule(cfg.epsilon_start, cfg.epsilon_end, int(cfg.epsilon_decay_fraction * cfg.budget))
    returns = train_q_learning(student, env, cfg.budget, master.derive("train"), cfg.sat.gamma, schedule,
                               double=cfg.algorithm == "double_dqn", batch_size=cfg.batch_size,
                               learning_starts=cfg.learning_starts,
                               target_sync_interval=cfg.sat.target_sync_interval, grad_clip=cfg.grad_clip)
    n_params = count_parameters(student.online)
    metrics = metrics.model_copy(update={
        "train_returns": returns,
        "train_phases": ["train"] * len(returns),
        "env_steps": student.env_steps,
        "wall_time": time.perf_counter() - started,
        "parameter_counts": {"student": n_params, "total": n_params},
        "params_ratio": 1.0,
    })
    return TrainingOutcome(student.online, metrics)


def train_algorithm(cfg: RunConfig) -> TrainingOutcome:
    return train_sat_enq(cfg) if cfg.is_sat_enq else train_baseline(cfg)


def evaluate_outcome(cfg: RunConfig, outcome: TrainingOutcome) -> RunMetrics:
    env = make_env(cfg.env)
    result = evaluate_policy(outcome.policy, env, cfg.eval_episodes, Rng(cfg.seed).derive("eval"))
    failed = is_failure(result.mean, env.optimal_reference, env.return_floor)
    logger.info(f"[{cfg.display_label} seed={cfg.seed}] eval return {result.mean:.3f} +/- {result.std:.3f}, "
                f"success {result.success_rate:.0%}{' FAILED' if failed else ''}")
    return outcome.metrics.model_copy(update={
        "eval_return_mean": result.mean,
        "eval_return_std": result.std,
        "success_rate": result.success_rate,
        "failed": failed,
    })


def failure_metrics(cfg: RunConfig, error: BaseException) -> RunMetrics:
    """Record for a run that crashed: counted as catastrophic, scored at the return floor."""
    cfg = cfg.effective()
    env = make_env(cfg.env)
    return _base_metrics(cfg, env).model_copy(update={
        "failed": True,
        "error": f"{type(error).__name__}: {error}",
        "eval_return_mean": env.return_floor,
    })


def _run(cfg: RunConfig, trainer) -> RunMetrics:
    try:
        return evaluate_outcome(cfg, trainer(cfg))
    except (SatEnqError, FloatingPointError) as e:
        logger.error(f"[{cfg.display_label} seed={cfg.seed}] run failed: {e}")
        return failure_metrics(cfg, e)


def run_sat_enq(cfg: RunConfig) -> RunMetrics:
    return _run(cfg, train_sat_enq)


def run_baseline(cfg: RunConfig) -> RunMetrics:
    return _run(cfg, train_baseline)


def run_algorithm(cfg: RunConfig) -> RunMetrics:
    return _run(cfg, train_algorithm)
