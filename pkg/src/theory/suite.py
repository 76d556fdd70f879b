import json
import logging
import math
import os
import time
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.numerics import Rng, random_gradient_check
from src.satcore import random_mdp
from .contraction import check_contraction, contraction_sweep
from .distributions import Gaussian, TwoPoint, random_distribution
from .variance import censored_normal_variance, clip_variance_mc, variance_decomposition

logger = logging.getLogger(__name__)


class TheoryConfig(BaseModel):
    seed: int = 0
    variance_pairs: int = Field(1000, ge=1)
    variance_samples: int = Field(100_000, ge=1000)
    strict_mass: float = 0.01
    identity_rtol: float = 1e-9
    formula_atol: float = 1e-12
    oracle_samples: int = Field(10_000_000, ge=1000)
    contraction_mdps: int = Field(1000, ge=1)
    gamma: float = 0.99
    margin: float = 0.5
    gradient_nets: int = Field(100, ge=1)
    gradient_tol: float = 1e-4


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str
    metrics: Dict[str, float] = {}
    seconds: float = 0.0


class TheoryReport(BaseModel):
    config: TheoryConfig
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _pick_threshold(dist, rng) -> float:
    """Random-quantile threshold, above the support about one time in ten"""
    pilot = np.asarray(dist.sample(2000, rng))
    q = float(rng.uniform(0.0, 1.1))
    if q >= 1.0:
        top = dist.support_max
        return float(top + 1.0 if math.isfinite(top) else pilot.max() + 50.0 * (pilot.std() + 1.0))
    return float(np.quantile(pilot, q))


def check_variance_reduction(cfg: TheoryConfig, rng) -> List[CheckResult]:
    """Variance non-increase over random (distribution, threshold) pairs plus the decomposition identity."""
    n = cfg.variance_samples
    slack = 1.0 + 3.0 / math.sqrt(n)
    bound_violations = strict_violations = equality_violations = 0
    worst_identity = worst_formula = 0.0
    for _ in range(cfg.variance_pairs):
        dist = random_distribution(rng)
        c = _pick_threshold(dist, rng)
        report = clip_variance_mc(dist, c, n, rng)
        if report.var_y > report.var_x * slack:
            bound_violations += 1
        if report.p > cfg.strict_mass and not report.var_y < report.var_x:
            strict_violations += 1
        if report.p == 0.0 and abs(report.var_y - report.var_x) > report.tolerance:
            equality_violations += 1
        d = variance_decomposition(report.p, report.mu_le, report.mu_gt, report.var_le, report.var_gt, c)
        scale = max(report.var_x, 1e-300)
        worst_identity = max(worst_identity,
                             abs(d.var_y - report.var_y) / scale,
                             abs(d.var_x - report.var_x) / scale)
        worst_formula = max(worst_formula, abs(d.reduction - d.reduction_formula) / max(1.0, scale))

    monotone = CheckResult(
        name="variance_non_increase",
        passed=bound_violations == 0 and strict_violations == 0 and equality_violations == 0,
        detail=(f"{cfg.variance_pairs} pairs at n={n}: {bound_violations} above Var(X)(1+3/sqrt(n)), "
                f"{strict_violations} non-strict with p>{cfg.strict_mass}, "
                f"{equality_violations} unequal with p=0"),
        metrics={"pairs": cfg.variance_pairs, "bound_violations": bound_violations,
                 "strict_violations": strict_violations, "equality_violations": equality_violations},
    )
    identity = CheckResult(
        name="variance_decomposition",
        passed=worst_identity < cfg.identity_rtol and worst_formula < cfg.formula_atol,
        detail=(f"rebuilt variances within {worst_identity:.2e} relative of direct ones, "
                f"closed-form reduction within {worst_formula:.2e}"),
        metrics={"worst_identity_rel": worst_identity, "worst_formula_abs": worst_formula},
    )
    return [monotone, identity]


def check_exact_laws(cfg: TheoryConfig, rng) -> CheckResult:
    """Hand-derived cases: the two-point law and the censored standard normal."""
    two_point = variance_decomposition(0.5, 0.0, 2.0, 0.0, 0.0, 1.0)
    two_point_ok = math.isclose(two_point.var_y, 0.25) and math.isclose(two_point.var_x, 1.0)

    exact = censored_normal_variance(0.0, 1.0, 0.0)
    closed = 0.5 * (1.0 - 1.0 / math.pi)
    x = Gaussian().sample(cfg.oracle_samples, rng)
    y = np.minimum(x, 0.0)
    dev2 = (y - y.mean()) ** 2
    se = float(dev2.std() / math.sqrt(y.size))
    mc = float(dev2.mean())
    censored_ok = math.isclose(exact, closed, rel_tol=1e-12) and abs(mc - exact) <= 3.0 * se

    two_point_mc = clip_variance_mc(TwoPoint(), 1.0, cfg.variance_samples, rng)
    return CheckResult(
        name="exact_laws",
        passed=two_point_ok and censored_ok,
        detail=(f"two-point Var(Y)={two_point.var_y:.4f} Var(X)={two_point.var_x:.4f}; "
                f"censored normal exact={exact:.6f} mc={mc:.6f} (se {se:.1e})"),
        metrics={"two_point_var_y": two_point.var_y, "two_point_var_x": two_point.var_x,
                 "two_point_mc_var_y": two_point_mc.var_y, "censored_exact": exact,
                 "censored_mc": mc, "censored_se": se},
    )


def check_contraction_suite(cfg: TheoryConfig, rng) -> CheckResult:
    sweep = contraction_sweep(rng, n_mdps=cfg.contraction_mdps, gamma=cfg.gamma, margin=cfg.margin)
    zero_gamma = check_contraction(random_mdp(5, 2, rng), 0.0, cfg.margin, 0.0, 20, rng).max_ratio
    passed = (sweep.max_ratio <= cfg.gamma + 1e-12 and sweep.worst_gap < 1e-10
              and sweep.slow_convergence == 0 and sweep.boundedness_ok and zero_gamma == 0.0)
    detail = (f"{sweep.mdps} MDPs: max ratio {sweep.max_ratio:.6f} (gamma {cfg.gamma}), "
              f"fixed-point gap {sweep.worst_gap:.1e}, clipped bootstrap <= B+m everywhere: "
              f"{sweep.boundedness_ok}")
    if sweep.printed_bound_violations:
        detail += (f"; note: Q itself exceeded B+m on {sweep.printed_bound_violations} MDPs, "
                   f"only the bootstrap term is bounded by the clip")
    return CheckResult(
        name="contraction",
        passed=passed,
        detail=detail,
        metrics={"max_ratio": sweep.max_ratio, "worst_gap": sweep.worst_gap,
                 "slow_convergence": sweep.slow_convergence,
                 "printed_bound_violations": sweep.printed_bound_violations,
                 "zero_gamma_ratio": zero_gamma},
    )


def check_gradients(cfg: TheoryConfig, rng) -> CheckResult:
    worst = random_gradient_check(rng, n_nets=cfg.gradient_nets)
    return CheckResult(
        name="gradients",
        passed=worst < cfg.gradient_tol,
        detail=f"{cfg.gradient_nets} random nets: max relative error {worst:.2e}",
        metrics={"max_relative_error": worst},
    )


def verify_theory(cfg: Optional[TheoryConfig] = None, output_dir: Optional[str] = None) -> TheoryReport:
    """Run every executable check and optionally write `theory_summary.json`."""
    cfg = cfg or TheoryConfig()
    root = Rng(cfg.seed).derive("theory")
    if output_dir is not None:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        if not os.access(output_dir, os.W_OK):
            raise OSError(f"Output directory is not writable: {output_dir}")

    checks: List[CheckResult] = []
    steps = [
        ("variance", lambda r: check_variance_reduction(cfg, r)),
        ("exact", lambda r: [check_exact_laws(cfg, r)]),
        ("contraction", lambda r: [check_contraction_suite(cfg, r)]),
        ("gradients", lambda r: [check_gradients(cfg, r)]),
    ]
    for purpose, step in steps:
        started = time.perf_counter()
        results = step(root.derive(purpose))
        elapsed = time.perf_counter() - started
        for result in results:
            result.seconds = elapsed
            logger.info(f"{result.name}: {'PASS' if result.passed else 'FAIL'} ({elapsed:.1f}s) {result.detail}")
        checks.extend(results)

    report = TheoryReport(config=cfg, checks=checks)
    if output_dir is not None:
        path = Path(output_dir) / "theory_summary.json"
        payload = report.model_dump()
        payload["passed"] = report.passed
        path.write_text(json.dumps(payload, indent=2))
        logger.info(f"Theory summary written to {path}")
    return report
