import hashlib
import json
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from src.envs import EnvSpec
from src.satcore import SatConfig

ALGORITHMS = (
    "sat_enq", "dqn", "double_dqn",
    "sat_enq_no_satisficing", "sat_enq_single_learner", "sat_enq_no_polish",
)
Algorithm = Literal[
    "sat_enq", "dqn", "double_dqn",
    "sat_enq_no_satisficing", "sat_enq_single_learner", "sat_enq_no_polish",
]


class RunConfig(BaseModel):
    """Everything one training run needs; defaults follow the published setup."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    algorithm: Algorithm = "sat_enq"
    label: Optional[str] = None
    seed: int = 0
    env: EnvSpec = EnvSpec()
    sat: SatConfig = SatConfig()

    k: int = Field(4, ge=1)
    weak_hidden: List[int] = [32, 32]
    student_hidden: List[int] = [64, 64]

    baseline_kind: Literal["auto", "episodic", "learned"] = "auto"
    baseline_alpha: float = Field(0.99, ge=0.0, le=1.0)
    baseline_hidden: List[int] = [32]
    baseline_capacity: int = Field(5000, ge=1)

    total_steps: Optional[int] = Field(None, ge=1)
    phase1_fraction: float = Field(0.5, gt=0.0, lt=1.0)
    phase1_episodes: Optional[int] = Field(None, ge=1)
    distill_steps: int = Field(2000, ge=0)
    polish_steps: Optional[int] = Field(None, ge=0)

    batch_size: int = Field(64, ge=1)
    learning_rate: float = Field(1e-3, gt=0.0)
    learning_starts: int = Field(64, ge=1)
    grad_clip: Optional[float] = Field(10.0, gt=0.0)
    weak_buffer_capacity: int = Field(10_000, ge=1)
    polish_buffer_capacity: int = Field(20_000, ge=1)

    epsilon_start: float = Field(1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(0.05, ge=0.0, le=1.0)
    epsilon_decay_fraction: float = Field(0.5, gt=0.0, le=1.0)
    polish_epsilon_start: float = Field(0.1, ge=0.0, le=1.0)

    eval_episodes: int = Field(100, ge=1)
    diversity_states: int = Field(256, ge=1)
    eval_noise_prob: Optional[float] = Field(None, ge=0.0, le=1.0)

    @property
    def display_label(self) -> str:
        return self.label or self.algorithm

    @property
    def budget(self) -> int:
        return self.total_steps or self.env.default_total_steps

    @property
    def is_sat_enq(self) -> bool:
        return self.algorithm.startswith("sat_enq")

    def effective(self) -> "RunConfig":
        """Apply the switches an ablation name implies."""
        update = {"total_steps": self.budget}
        if self.algorithm == "sat_enq_single_learner":
            update["k"] = 1
        elif self.algorithm == "sat_enq_no_satisficing":
            update["sat"] = self.sat.model_copy(update={"clip_targets": False, "hinge_weight": 0.0})
        elif self.algorithm == "sat_enq_no_polish":
            update["polish_steps"] = 0
        return self.model_copy(update=update)

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
