import logging
from typing import Callable, Dict, List, NamedTuple, Sequence

from src.pipeline import RunMetrics
from .models import AggregateReport

logger = logging.getLogger(__name__)

MAX_PARAMS_RATIO = 1.5


class AcceptanceCheck(NamedTuple):
    name: str
    passed: bool
    detail: str


def _rows(report: AggregateReport) -> Dict[str, object]:
    return {row.algorithm: row for row in report.rows}


def _missing(name: str, *labels: str) -> AcceptanceCheck:
    return AcceptanceCheck(name, False, f"missing results for {', '.join(labels)}")


def gridworld_success(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    rows = _rows(report)
    if "sat_enq" not in rows or "dqn" not in rows:
        return [_missing("gridworld_success", "sat_enq", "dqn")]
    sat, dqn = rows["sat_enq"], rows["dqn"]
    passed = sat.success_rate >= 0.70 and dqn.success_rate <= 0.30 and sat.failure_rate <= 10.0
    return [AcceptanceCheck("gridworld_success", passed,
                            f"Sat-EnQ success {sat.success_rate:.0%} (failure {sat.failure_rate:.0f}%), "
                            f"DQN success {dqn.success_rate:.0%}")]


def cartpole_stability(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    rows = _rows(report)
    if "sat_enq" not in rows or "dqn" not in rows:
        return [_missing("cartpole_stability", "sat_enq", "dqn")]
    sat, dqn = rows["sat_enq"], rows["dqn"]
    variance_ok = (sat.variance is not None and dqn.variance is not None
                   and sat.variance < 0.5 * dqn.variance)
    levene_ok = sat.levene_p is not None and sat.levene_p < 0.05
    passed = sat.failure_rate == 0.0 and dqn.failure_rate >= 30.0 and variance_ok and levene_ok
    return [AcceptanceCheck("cartpole_stability", passed,
                            f"failure {sat.failure_rate:.0f}% vs {dqn.failure_rate:.0f}%, "
                            f"variance {sat.variance} vs {dqn.variance}, Levene p={sat.levene_p}")]


def noise_robustness(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    rows = _rows(report)
    if "sat_enq" not in rows or "dqn" not in rows:
        return [_missing("noise_robustness", "sat_enq", "dqn")]
    sat, dqn = rows["sat_enq"].noisy_ratio, rows["dqn"].noisy_ratio
    passed = sat is not None and dqn is not None and sat - dqn >= 0.05
    return [AcceptanceCheck("noise_robustness", passed, f"noisy/clean ratio {sat} vs DQN {dqn}")]


def acrobot_limitation(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    sat = [r.eval_return_mean for r in records if r.label == "sat_enq"]
    ddqn = [r.eval_return_mean for r in records if r.label == "double_dqn"]
    if not sat or not ddqn:
        return [_missing("acrobot_limitation", "sat_enq", "double_dqn")]
    solved = sum(1 for v in ddqn if v > -450.0)
    passed = all(v <= -450.0 for v in sat) and solved >= (len(ddqn) + 1) // 2
    return [AcceptanceCheck("acrobot_limitation", passed,
                            f"Sat-EnQ worst-case max {max(sat):.1f}, Double DQN above -450 on {solved}/{len(ddqn)} seeds")]


def single_learner_variance(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    rows = _rows(report)
    if "sat_enq" not in rows or "sat_enq_single_learner" not in rows:
        return [_missing("single_learner_variance", "sat_enq", "sat_enq_single_learner")]
    full, single = rows["sat_enq"].variance, rows["sat_enq_single_learner"].variance
    passed = full is not None and single is not None and single >= 2.0 * full
    return [AcceptanceCheck("single_learner_variance", passed, f"K=1 variance {single} vs K=4 {full}")]


def no_satisficing_failures(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    rows = _rows(report)
    if "sat_enq" not in rows or "sat_enq_no_satisficing" not in rows:
        return [_missing("no_satisficing_failures", "sat_enq", "sat_enq_no_satisficing")]
    full, ablated = rows["sat_enq"].failure_rate, rows["sat_enq_no_satisficing"].failure_rate
    return [AcceptanceCheck("no_satisficing_failures", ablated > 0.0 and full == 0.0,
                            f"failure {ablated:.0f}% without clipping vs {full:.0f}% with")]


def parameter_overhead(report: AggregateReport, records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    ratios = [row.params_ratio for row in report.rows
              if row.algorithm.startswith("sat_enq") and row.params_ratio is not None]
    if not ratios:
        return []
    worst = max(ratios)
    return [AcceptanceCheck("parameter_overhead", worst <= MAX_PARAMS_RATIO, f"max params ratio {worst:.3f}x")]


CRITERIA: Dict[str, List[Callable]] = {
    "table1": [gridworld_success, parameter_overhead],
    "table2": [cartpole_stability, parameter_overhead],
    "table3": [noise_robustness],
    "table5": [acrobot_limitation],
    "ablation_single_learner": [single_learner_variance],
    "ablation_no_satisficing": [no_satisficing_failures],
}


def evaluate_acceptance(target: str, report: AggregateReport,
                        records: Sequence[RunMetrics]) -> List[AcceptanceCheck]:
    """Directional checks that apply to a reproduction target; informational only."""
    checks: List[AcceptanceCheck] = []
    for criterion in CRITERIA.get(target, []):
        checks.extend(criterion(report, records))
    for check in checks:
        logger.info(f"{check.name}: {'PASS' if check.passed else 'FAIL'} {check.detail}")
    return checks
