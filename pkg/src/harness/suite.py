import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

from src.envs import NoiseConfig
from src.numerics import Rng
from src.pipeline import RunConfig, RunMetrics, evaluate_outcome, failure_metrics, train_algorithm
from .models import AggregateReport, ExperimentConfig
from .outputs import emit_outputs, ensure_writable
from .robustness import robustness_eval
from .settings import default_output_dir, default_workers
from .stats import aggregate

logger = logging.getLogger(__name__)

RUNS_DIR = "runs"
POLICIES_DIR = "policies"
CHECKPOINTS_DIR = "checkpoints"


def record_name(cfg: RunConfig) -> str:
    """Content address of a run: label, env, seed and config hash."""
    return f"{cfg.display_label}__{cfg.env.tag()}__seed{cfg.seed}__{cfg.config_hash()[:12]}"


def _write_atomic(path: Path, payload: Dict[str, Any]) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2))
    os.replace(tmp, path)


class RunArtifacts(NamedTuple):
    metrics: RunMetrics
    policy: Optional[Dict[str, Any]] = None
    phase1_checkpoint: Optional[Dict[str, Any]] = None


def execute_run(cfg: RunConfig) -> RunArtifacts:
    """Train, evaluate and optionally noise-test one run; any crash becomes a failure record."""
    try:
        outcome = train_algorithm(cfg)
        metrics = evaluate_outcome(cfg, outcome)
        if cfg.eval_noise_prob is not None:
            result = robustness_eval(outcome.policy, cfg.env, NoiseConfig(action_noise_prob=cfg.eval_noise_prob),
                                     cfg.eval_episodes, Rng(cfg.seed).derive("robustness"))
            metrics = metrics.model_copy(update={"noisy_return_mean": result.noisy_mean,
                                                 "robustness_ratio": result.ratio})
        return RunArtifacts(metrics, outcome.policy.to_dict(), outcome.phase1_checkpoint)
    except Exception as e:
        logger.error(f"[{cfg.display_label} seed={cfg.seed}] run crashed: {type(e).__name__}: {e}")
        return RunArtifacts(failure_metrics(cfg, e))


def _execute_payload(payload: Dict[str, Any]) -> Tuple[Dict[str, Any], Optional[Dict[str, Any]],
                                                      Optional[Dict[str, Any]]]:
    metrics, policy, checkpoint = execute_run(RunConfig.model_validate(payload))
    return metrics.model_dump(mode="json"), policy, checkpoint


def write_artifacts(root: Path, name: str, artifacts: RunArtifacts) -> Path:
    """Run record under runs/, policy and Phase-1 checkpoint beside it when present"""
    _write_atomic(ensure_writable(root / RUNS_DIR) / f"{name}.json", artifacts.metrics.model_dump(mode="json"))
    if artifacts.policy is not None:
        _write_atomic(ensure_writable(root / POLICIES_DIR) / f"{name}.json", artifacts.policy)
    if artifacts.phase1_checkpoint is not None:
        _write_atomic(ensure_writable(root / CHECKPOINTS_DIR) / f"{name}.json", artifacts.phase1_checkpoint)
    return root / RUNS_DIR / f"{name}.json"


def load_checkpoint(path) -> Dict[str, Any]:
    return json.loads(Path(path).read_text())


class SuiteResult(NamedTuple):
    report: AggregateReport
    records: List[RunMetrics]
    executed: int
    skipped: int


def load_record(path) -> RunMetrics:
    return RunMetrics.model_validate_json(Path(path).read_text())


def load_records(output_dir) -> List[RunMetrics]:
    runs = Path(output_dir) / RUNS_DIR
    if not runs.is_dir():
        return []
    return [load_record(p) for p in sorted(runs.glob("*.json"))]


def run_suite(cfg: ExperimentConfig, output_dir=None, workers: Optional[int] = None) -> SuiteResult:
    """Run every (variant, seed) cell not already on disk, persisting each as it completes"""
    root = ensure_writable(output_dir or cfg.output_dir or default_output_dir())
    runs_dir = ensure_writable(root / RUNS_DIR)
    workers = workers or default_workers()

    cells = cfg.run_configs()
    pending: List[RunConfig] = []
    records: Dict[str, RunMetrics] = {}
    for run_cfg in cells:
        name = record_name(run_cfg)
        path = runs_dir / f"{name}.json"
        if path.exists():
            records[name] = load_record(path)
        else:
            pending.append(run_cfg)
    skipped = len(records)
    logger.info(f"Suite: {len(cells)} cells, {skipped} already complete, {len(pending)} to run "
                f"({workers} worker{'s' if workers != 1 else ''})")

    def _persist(run_cfg: RunConfig, artifacts: RunArtifacts) -> None:
        name = record_name(run_cfg)
        write_artifacts(root, name, artifacts)
        metrics = artifacts.metrics
        records[name] = metrics
        logger.info(f"Saved {name} (return {metrics.eval_return_mean:.3f}{', failed' if metrics.failed else ''})")

    if workers <= 1:
        for run_cfg in pending:
            _persist(run_cfg, execute_run(run_cfg))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(run_cfg, pool.submit(_execute_payload, run_cfg.model_dump(mode="json")))
                       for run_cfg in pending]
            for run_cfg, future in futures:
                try:
                    metrics_raw, policy, checkpoint = future.result()
                    artifacts = RunArtifacts(RunMetrics.model_validate(metrics_raw), policy, checkpoint)
                except Exception as e:
                    logger.error(f"[{run_cfg.display_label} seed={run_cfg.seed}] worker failed: {e}")
                    artifacts = RunArtifacts(failure_metrics(run_cfg, e))
                _persist(run_cfg, artifacts)

    ordered = [records[record_name(c)] for c in cells]
    report = aggregate(ordered, reference=cfg.reference_label, center=cfg.levene_center)
    emit_outputs(report, root)
    return SuiteResult(report, ordered, len(pending), skipped)


def report_from_dir(output_dir, reference: Optional[str] = None, center: str = "median") -> AggregateReport:
    """Re-aggregate the run records already stored under `output_dir`."""
    records = load_records(output_dir)
    if reference is None and any(r.label == "dqn" for r in records):
        reference = "dqn"
    return aggregate(records, reference=reference, center=center)
