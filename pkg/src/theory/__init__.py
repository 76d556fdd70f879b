from .distributions import (
    TwoPoint, Uniform, Gaussian, GaussianMixture, Empirical, ScalarDistribution, random_distribution,
)
from .variance import (
    VarianceReport, Decomposition, clip_variance_mc, exact_clip_report, variance_decomposition,
    censored_normal_variance,
)
from .contraction import ContractionResult, BoundednessResult, check_contraction, check_boundedness, contraction_sweep
from .suite import TheoryConfig, CheckResult, TheoryReport, verify_theory

__all__ = [
    "TwoPoint", "Uniform", "Gaussian", "GaussianMixture", "Empirical", "ScalarDistribution",
    "random_distribution",
    "VarianceReport", "Decomposition", "clip_variance_mc", "exact_clip_report", "variance_decomposition",
    "censored_normal_variance",
    "ContractionResult", "BoundednessResult", "check_contraction", "check_boundedness", "contraction_sweep",
    "TheoryConfig", "CheckResult", "TheoryReport", "verify_theory",
]
