from typing import Any, Callable, Dict, List

from src.errors import ConfigError
from .models import ExperimentConfig, VariantSpec

BASELINE_SET = ("sat_enq", "dqn", "double_dqn")
MARGINS = (0.1, 0.5, 1.0, 2.0, 5.0)
ENSEMBLE_SIZES = (1, 2, 4, 6, 8)
SLIP_PROBS = (0.1, 0.2, 0.3)


def _variants(algorithms, overrides: Dict[str, Any] = None) -> List[VariantSpec]:
    return [VariantSpec(algorithm=a, overrides=dict(overrides or {})) for a in algorithms]


def _table1() -> ExperimentConfig:
    return ExperimentConfig(target="table1", defaults={"env": {"name": "gridworld", "slip_prob": 0.2}},
                            variants=_variants(BASELINE_SET))


def _table2() -> ExperimentConfig:
    return ExperimentConfig(target="table2", defaults={"env": {"name": "cartpole"}},
                            variants=_variants(BASELINE_SET))


def _table3() -> ExperimentConfig:
    return ExperimentConfig(target="table3", defaults={"env": {"name": "cartpole"}, "eval_noise_prob": 0.1},
                            variants=_variants(BASELINE_SET))


def _table5() -> ExperimentConfig:
    return ExperimentConfig(target="table5", defaults={"env": {"name": "acrobot"}},
                            variants=_variants(BASELINE_SET), reference_algorithm="double_dqn")


def _slip_sweep() -> ExperimentConfig:
    variants = [VariantSpec(algorithm=a, overrides={"env": {"slip_prob": p}})
                for p in SLIP_PROBS for a in ("sat_enq", "dqn")]
    return ExperimentConfig(target="slip_sweep", defaults={"env": {"name": "gridworld"}}, variants=variants)


def _ablation(target: str, variant: str) -> Callable[[], ExperimentConfig]:
    def build() -> ExperimentConfig:
        return ExperimentConfig(target=target, defaults={"env": {"name": "cartpole"}},
                                variants=_variants(("sat_enq", variant)), reference_algorithm="sat_enq")
    return build


def _ablation_margin() -> ExperimentConfig:
    variants = [VariantSpec(label=f"sat_enq_m{m:g}", overrides={"sat": {"margin": m}}) for m in MARGINS]
    return ExperimentConfig(target="ablation_margin", defaults={"env": {"name": "cartpole"}},
                            variants=variants, reference_algorithm="sat_enq_m0.5")


def _ablation_k() -> ExperimentConfig:
    variants = [VariantSpec(label=f"sat_enq_k{k}", overrides={"k": k}) for k in ENSEMBLE_SIZES]
    return ExperimentConfig(target="ablation_k", defaults={"env": {"name": "cartpole"}},
                            variants=variants, reference_algorithm="sat_enq_k4")


TARGETS: Dict[str, Callable[[], ExperimentConfig]] = {
    "table1": _table1,
    "table2": _table2,
    "table3": _table3,
    "table5": _table5,
    "slip_sweep": _slip_sweep,
    "ablation_no_satisficing": _ablation("ablation_no_satisficing", "sat_enq_no_satisficing"),
    "ablation_single_learner": _ablation("ablation_single_learner", "sat_enq_single_learner"),
    "ablation_no_polish": _ablation("ablation_no_polish", "sat_enq_no_polish"),
    "ablation_margin": _ablation_margin,
    "ablation_k": _ablation_k,
}


def target_config(tag: str) -> ExperimentConfig:
    """Preset experiment for a reproduction tag."""
    if tag not in TARGETS:
        raise ConfigError(f"Unknown target {tag!r}; choose from {', '.join(TARGETS)}", field_path="target")
    return TARGETS[tag]()
