from src.pipeline import RunMetrics
from .models import (
    VariantSpec, ExperimentConfig, AggregateRow, AggregateReport, CurvePoint,
    load_experiment_config, parse_experiment_config, deep_merge,
)
from .stats import LeveneResult, levene_test, levene_permutation_pvalue, aggregate, return_curves, curve_key
from .robustness import RobustnessResult, robustness_eval
from .outputs import SUMMARY_COLUMNS, CURVE_COLUMNS, emit_outputs, ensure_writable, read_summary_csv, read_curve_csv
from .suite import (
    SuiteResult, RunArtifacts, execute_run, run_suite, record_name, load_records, load_checkpoint, report_from_dir,
    write_artifacts,
)
from .targets import TARGETS, target_config
from .acceptance import AcceptanceCheck, evaluate_acceptance
from .settings import default_output_dir, default_workers, log_level

__all__ = [
    "RunMetrics", "VariantSpec", "ExperimentConfig", "AggregateRow", "AggregateReport", "CurvePoint",
    "load_experiment_config", "parse_experiment_config", "deep_merge",
    "LeveneResult", "levene_test", "levene_permutation_pvalue", "aggregate", "return_curves", "curve_key",
    "RobustnessResult", "robustness_eval",
    "SUMMARY_COLUMNS", "CURVE_COLUMNS", "emit_outputs", "ensure_writable", "read_summary_csv", "read_curve_csv",
    "SuiteResult", "RunArtifacts", "execute_run", "run_suite", "record_name", "load_records", "load_checkpoint",
    "report_from_dir", "write_artifacts",
    "TARGETS", "target_config", "AcceptanceCheck", "evaluate_acceptance",
    "default_output_dir", "default_workers", "log_level",
]
