from typing import Dict, List, Optional

from pydantic import BaseModel, Field


def failure_threshold(optimal_reference: float, return_floor: float) -> float:
    """Return below which a run counts as a catastrophic failure (half-way from floor to optimum)."""
    return return_floor + 0.5 * (optimal_reference - return_floor)


def is_failure(eval_return: float, optimal_reference: float, return_floor: float) -> bool:
    return eval_return < failure_threshold(optimal_reference, return_floor)


class RunMetrics(BaseModel):
    seed: int
    algorithm: str
    label: str
    env: str
    config_hash: str = ""

    eval_return_mean: float = 0.0
    eval_return_std: float = 0.0
    success_rate: float = 0.0
    train_returns: List[float] = Field(default_factory=list)
    # phase of each training episode: "phase1", "polish" or "train"
    train_phases: List[str] = Field(default_factory=list)

    failed: bool = False
    error: Optional[str] = None
    optimal_reference: float = 0.0
    failure_threshold: float = 0.0

    env_steps: int = 0
    wall_time: float = 0.0
    parameter_counts: Dict[str, int] = Field(default_factory=dict)
    params_ratio: Optional[float] = None

    # Sat-EnQ only
    diversity: Optional[float] = None
    phase1_episodes: Optional[int] = None
    distill_loss_first: Optional[float] = None
    distill_loss_last: Optional[float] = None

    # filled in when the run is also evaluated under action noise
    noisy_return_mean: Optional[float] = None
    robustness_ratio: Optional[float] = None
