import logging
import math
from collections import defaultdict
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.pipeline import RunMetrics
from .models import AggregateReport, AggregateRow, CurvePoint

logger = logging.getLogger(__name__)

CENTERS = ("median", "mean")


class LeveneResult(NamedTuple):
    statistic: float
    p_value: float
    center: str
    df_between: int
    df_within: int


def _constant_spread(groups: List[np.ndarray], center: str) -> Optional[float]:
    """W when every group has constant deviations from its center, else None"""
    centre = np.median if center == "median" else np.mean
    devs = [np.abs(g - centre(g)) for g in groups]
    if any(np.ptp(d) > 0.0 for d in devs):
        return None
    means = np.array([d.mean() for d in devs])
    return 0.0 if np.ptp(means) == 0.0 else math.inf


def _levene_statistic(groups: List[np.ndarray], center: str) -> float:
    degenerate = _constant_spread(groups, center)
    if degenerate is not None:
        return degenerate
    return float(stats.levene(*groups, center=center).statistic)


def _validate_groups(groups: Sequence[Sequence[float]], center: str) -> List[np.ndarray]:
    if center not in CENTERS:
        raise ValueError(f"center must be one of {CENTERS}, got {center!r}")
    arrays = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    if len(arrays) < 2:
        raise ValueError(f"Levene's test needs at least 2 groups, got {len(arrays)}")
    if any(a.size < 2 for a in arrays):
        raise ValueError("Each group needs at least 2 observations")
    return arrays


def levene_test(groups: Sequence[Sequence[float]], center: str = "median") -> LeveneResult:
    """Levene's test; center="median" is Brown-Forsythe. Constant within-group spread gives W 0 or inf"""
    arrays = _validate_groups(groups, center)
    k = len(arrays)
    n_total = sum(a.size for a in arrays)
    w = _constant_spread(arrays, center)
    if w is None:
        result = stats.levene(*arrays, center=center)
        w, p = float(result.statistic), float(result.pvalue)
    else:
        p = 0.0 if math.isinf(w) else 1.0
    return LeveneResult(w, p, center, k - 1, n_total - k)


def levene_permutation_pvalue(groups: Sequence[Sequence[float]], rng, n_permutations: int = 10_000,
                              center: str = "median") -> float:
    """Share of label permutations whose statistic reaches the observed one."""
    arrays = _validate_groups(groups, center)
    observed = _levene_statistic(arrays, center)
    pooled = np.concatenate(arrays)
    cuts = np.cumsum([a.size for a in arrays])[:-1]
    hits = 0
    for _ in range(n_permutations):
        shuffled = pooled[rng.generator.permutation(pooled.size)]
        if _levene_statistic(np.split(shuffled, cuts), center) >= observed * (1 - 1e-12):
            hits += 1
    return (hits + 1) / (n_permutations + 1)


def _group_key(record: RunMetrics) -> Tuple[str, str]:
    return record.label, record.env


def _mean_or_none(values: List[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def _phase_series(record: RunMetrics) -> Dict[str, List[float]]:
    phases = record.train_phases or ["train"] * len(record.train_returns)
    if len(phases) != len(record.train_returns):
        raise ValueError(f"{record.label} seed {record.seed}: {len(phases)} phase labels "
                         f"for {len(record.train_returns)} training returns")
    series: Dict[str, List[float]] = {}
    for phase, value in zip(phases, record.train_returns):
        series.setdefault(phase, []).append(value)
    return series


def return_curves(records: Sequence[RunMetrics]) -> List[CurvePoint]:
    """Across-seed (mean, std) per episode, each phase aligned and truncated on its own"""
    per_seed = [_phase_series(r) for r in sorted(records, key=lambda r: r.seed) if r.train_returns]
    if not per_seed:
        return []
    points: List[CurvePoint] = []
    for phase in per_seed[0]:
        curves = [s.get(phase, []) for s in per_seed]
        length = min(len(c) for c in curves)
        if length == 0:
            continue
        data = np.array([c[:length] for c in curves], dtype=np.float64)
        means = data.mean(axis=0)
        stds = data.std(axis=0, ddof=1) if data.shape[0] >= 2 else None
        offset = len(points)
        points.extend(CurvePoint(episode=offset + i + 1, phase=phase, mean=float(means[i]),
                                 std=None if stds is None else float(stds[i]))
                      for i in range(length))
    return points


def aggregate(records: Sequence[RunMetrics], reference: Optional[str] = None,
              center: str = "median") -> AggregateReport:
    """Across-seed statistics per (label, env); Levene against `reference` in the same env."""
    groups: Dict[Tuple[str, str], List[RunMetrics]] = defaultdict(list)
    for record in records:
        groups[_group_key(record)].append(record)

    rows: List[AggregateRow] = []
    curves: Dict[str, List[CurvePoint]] = {}
    for (label, env), members in sorted(groups.items()):
        members = sorted(members, key=lambda r: r.seed)
        returns = np.array([r.eval_return_mean for r in members], dtype=np.float64)
        n = returns.size
        undefined = []
        std = variance = None
        if n >= 2:
            variance = float(returns.var(ddof=1))
            std = math.sqrt(variance)
        else:
            undefined += ["std", "variance"]
            logger.warning(f"{label} on {env}: only {n} seed, across-seed std is undefined")

        levene_w = levene_p = None
        if reference is not None and label != reference and (reference, env) in groups:
            ref_returns = [r.eval_return_mean for r in groups[(reference, env)]]
            if n >= 2 and len(ref_returns) >= 2:
                result = levene_test([returns, ref_returns], center=center)
                levene_w, levene_p = result.statistic, result.p_value
            else:
                undefined.append("levene_p")

        rows.append(AggregateRow(
            algorithm=label,
            env=env,
            seeds=n,
            mean=float(returns.mean()),
            std=std,
            variance=variance,
            failure_rate=100.0 * float(np.mean([r.failed for r in members])),
            levene_p=levene_p,
            levene_w=levene_w,
            levene_center=center if levene_p is not None else None,
            time=float(np.mean([r.wall_time for r in members])),
            params_ratio=_mean_or_none([r.params_ratio for r in members]),
            success_rate=float(np.mean([r.success_rate for r in members])),
            noisy_ratio=_mean_or_none([r.robustness_ratio for r in members]),
            env_steps=float(np.mean([r.env_steps for r in members])),
            diversity=_mean_or_none([r.diversity for r in members]),
            undefined=undefined,
        ))
        curves[curve_key(label, env)] = return_curves(members)
    return AggregateReport(rows=rows, curves=curves, reference=reference, levene_center=center)


def curve_key(label: str, env: str) -> str:
    return f"{label}__{env}"
