import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from src.errors import ConfigError
from src.harness import (
    AggregateReport, ExperimentConfig, emit_outputs, evaluate_acceptance, execute_run, load_experiment_config,
    log_level, default_output_dir, parse_experiment_config, record_name, report_from_dir, run_suite,
    target_config, TARGETS, write_artifacts,
)
from src.harness.models import deep_merge
from src.theory import TheoryConfig, verify_theory

load_dotenv()

logger = logging.getLogger("satenq")


def _fmt(value, spec: str = ".3f") -> str:
    return "n/a" if value is None else format(value, spec)


def print_report(report: AggregateReport) -> None:
    print(f"{'algorithm':<28}{'env':<22}{'seeds':>6}{'mean':>11}{'std':>10}{'variance':>12}"
          f"{'fail%':>7}{'success':>9}{'levene_p':>10}{'time':>8}{'params':>8}")
    for row in report.rows:
        print(f"{row.algorithm:<28}{row.env:<22}{row.seeds:>6}{_fmt(row.mean):>11}{_fmt(row.std):>10}"
              f"{_fmt(row.variance, '.2f'):>12}{row.failure_rate:>7.0f}{row.success_rate:>9.0%}"
              f"{_fmt(row.levene_p, '.4f'):>10}{row.time:>8.1f}{_fmt(row.params_ratio, '.2f'):>8}")
    if report.reference:
        print(f"Levene ({report.levene_center}-centered) against {report.reference}")


def cmd_train(args) -> int:
    raw = {}
    if args.config:
        raw = load_experiment_config(args.config).defaults
    overrides = {"algorithm": args.algorithm, "seed": args.seed}
    if args.env:
        overrides["env"] = {"name": args.env}
    if args.total_steps:
        overrides["total_steps"] = args.total_steps
    exp = parse_experiment_config({"seeds": [args.seed], "defaults": deep_merge(raw, overrides),
                                   "variants": [{"algorithm": args.algorithm}]})
    cfg = exp.run_configs()[0]
    artifacts = execute_run(cfg)
    metrics = artifacts.metrics
    path = write_artifacts(Path(args.output_dir or default_output_dir()), record_name(cfg), artifacts)
    status = "FAILED" if metrics.failed else "ok"
    print(f"{cfg.display_label} on {cfg.env.tag()} seed {cfg.seed}: return {metrics.eval_return_mean:.3f} "
          f"+/- {metrics.eval_return_std:.3f}, success {metrics.success_rate:.0%}, {status}")
    print(f"Record written to {path}")
    return 0


def _run_and_print(exp: ExperimentConfig, output_dir: str, workers: Optional[int]) -> None:
    result = run_suite(exp, output_dir=output_dir, workers=workers)
    print(f"Ran {result.executed} cell(s), reused {result.skipped}")
    print_report(result.report)
    if exp.target:
        checks = evaluate_acceptance(exp.target, result.report, result.records)
        for check in checks:
            print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")


def cmd_suite(args) -> int:
    exp = load_experiment_config(args.config)
    if args.seeds is not None:
        exp = exp.model_copy(update={"seeds": list(range(args.seeds))})
    _run_and_print(exp, args.output_dir or exp.output_dir or default_output_dir(), args.workers)
    return 0


def cmd_reproduce(args) -> int:
    exp = target_config(args.target)
    if args.seeds is not None:
        exp = exp.model_copy(update={"seeds": list(range(args.seeds))})
    if args.total_steps is not None:
        exp = exp.model_copy(update={"defaults": deep_merge(exp.defaults, {"total_steps": args.total_steps})})
    exp = parse_experiment_config(exp.model_dump())
    output_dir = args.output_dir or str(Path(default_output_dir()) / args.target)
    _run_and_print(exp, output_dir, args.workers)
    return 0


def cmd_verify_theory(args) -> int:
    cfg = TheoryConfig(seed=args.seed)
    if args.quick:
        cfg = cfg.model_copy(update={"variance_pairs": 100, "variance_samples": 10_000,
                                     "oracle_samples": 100_000, "contraction_mdps": 100, "gradient_nets": 10})
    report = verify_theory(cfg, output_dir=args.output_dir or default_output_dir())
    for check in report.checks:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")
    print("All theory checks passed" if report.passed else "Theory checks FAILED")
    return 0 if report.passed else 1


def cmd_report(args) -> int:
    report = report_from_dir(args.dir, reference=args.reference, center=args.center)
    if not report.rows:
        print(f"No run records under {args.dir}")
    emit_outputs(report, args.dir, formats=["csv"])
    print_report(report)
    return 0


def cmd_plot_data(args) -> int:
    report = report_from_dir(args.dir)
    written = emit_outputs(report, args.dir, formats=["plot-data"])
    print(f"Wrote {len(written)} curve file(s) under {Path(args.dir) / 'curves'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satenq", description="Satisficing ensemble Q-learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train and evaluate one run")
    train.add_argument("--algorithm", default="sat_enq",
                       choices=["sat_enq", "dqn", "double_dqn", "sat_enq_no_satisficing",
                                "sat_enq_single_learner", "sat_enq_no_polish"])
    train.add_argument("--env", choices=["gridworld", "cartpole", "acrobot"])
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--total-steps", type=int)
    train.add_argument("--config", help="experiment document whose defaults seed the run")
    train.add_argument("--output-dir")
    train.set_defaults(func=cmd_train)

    suite = sub.add_parser("suite", help="run a config-driven grid of runs")
    suite.add_argument("--config", default="experiment_config.json")
    suite.add_argument("--seeds", type=int, help="use seeds 0..N-1 instead of the configured list")
    suite.add_argument("--workers", type=int)
    suite.add_argument("--output-dir")
    suite.set_defaults(func=cmd_suite)

    theory = sub.add_parser("verify-theory", help="run the executable theory checks")
    theory.add_argument("--seed", type=int, default=0)
    theory.add_argument("--quick", action="store_true", help="reduced sample sizes")
    theory.add_argument("--output-dir")
    theory.set_defaults(func=cmd_verify_theory)

    reproduce = sub.add_parser("reproduce", help="run a preset reproduction target")
    reproduce.add_argument("--target", required=True, choices=sorted(TARGETS))
    reproduce.add_argument("--seeds", type=int)
    reproduce.add_argument("--total-steps", type=int)
    reproduce.add_argument("--workers", type=int)
    reproduce.add_argument("--output-dir")
    reproduce.set_defaults(func=cmd_reproduce)

    report = sub.add_parser("report", help="aggregate stored run records into summary.csv")
    report.add_argument("--dir", required=True)
    report.add_argument("--reference")
    report.add_argument("--center", choices=["median", "mean"], default="median")
    report.set_defaults(func=cmd_report)

    plot = sub.add_parser("plot-data", help="write per-episode return curves")
    plot.add_argument("--dir", required=True)
    plot.set_defaults(func=cmd_plot_data)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=log_level(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
