from .config import RunConfig, ALGORITHMS
from .metrics import RunMetrics, failure_threshold, is_failure
from .student import (StudentState, distill, polish, train_q_learning, dqn_targets,
                      double_dqn_targets, td_loss_and_grad)
from .evaluation import EvaluationResult, evaluate_policy
from .runs import (TrainingOutcome, make_baseline, train_sat_enq, train_baseline, train_algorithm,
                   evaluate_outcome, failure_metrics, run_sat_enq, run_baseline, run_algorithm)

__all__ = [
    "RunConfig", "ALGORITHMS", "RunMetrics", "failure_threshold", "is_failure",
    "StudentState", "distill", "polish", "train_q_learning", "dqn_targets", "double_dqn_targets",
    "td_loss_and_grad", "EvaluationResult", "evaluate_policy",
    "TrainingOutcome", "make_baseline", "train_sat_enq", "train_baseline", "train_algorithm",
    "evaluate_outcome", "failure_metrics", "run_sat_enq", "run_baseline", "run_algorithm",
]
