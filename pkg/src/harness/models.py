import copy
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.errors import ConfigError
from src.pipeline import RunConfig
from src.pipeline.config import Algorithm


def field_path(loc: Tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc)


def config_error(exc: ValidationError, prefix: str = "") -> ConfigError:
    """First validation failure as a ConfigError carrying its dotted location."""
    first = exc.errors()[0]
    path = field_path(tuple(first.get("loc", ())))
    if prefix:
        path = f"{prefix}.{path}" if path else prefix
    return ConfigError(first.get("msg", str(exc)), field_path=path or None)


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class VariantSpec(BaseModel):
    """One row of the experiment grid: an algorithm plus RunConfig overrides."""

    model_config = ConfigDict(extra="forbid")

    label: Optional[str] = None
    algorithm: Algorithm = "sat_enq"
    overrides: Dict[str, Any] = Field(default_factory=dict)

    @property
    def display_label(self) -> str:
        return self.label or self.algorithm


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    target: Optional[str] = None
    seeds: List[int] = Field(default_factory=lambda: list(range(10)))
    output_dir: Optional[str] = None
    defaults: Dict[str, Any] = Field(default_factory=dict)
    variants: List[VariantSpec] = Field(default_factory=lambda: [VariantSpec()])
    reference_algorithm: Optional[str] = None
    levene_center: Literal["median", "mean"] = "median"

    @model_validator(mode="after")
    def _check_grid(self):
        if not self.seeds:
            raise ValueError("At least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError(f"Duplicate seeds: {self.seeds}")
        return self

    def run_config(self, variant: VariantSpec, seed: int) -> RunConfig:
        raw = deep_merge(self.defaults, variant.overrides)
        raw.update({"algorithm": variant.algorithm, "label": variant.display_label, "seed": seed})
        try:
            return RunConfig.model_validate(raw).effective()
        except ValidationError as e:
            raise config_error(e, prefix=f"variants[{variant.display_label}]") from e

    def run_configs(self) -> List[RunConfig]:
        """Every (variant, seed) cell, validated."""
        cells = [self.run_config(v, s) for v in self.variants for s in self.seeds]
        seen = set()
        for cell in cells:
            key = (cell.display_label, cell.env.tag(), cell.seed)
            if key in seen:
                raise ConfigError(f"Two variants share label {key[0]!r} on {key[1]}", field_path="variants")
            seen.add(key)
        return cells

    @property
    def reference_label(self) -> Optional[str]:
        if self.reference_algorithm is not None:
            return self.reference_algorithm
        labels = [v.display_label for v in self.variants]
        return "dqn" if "dqn" in labels else None


def load_experiment_config(path) -> ExperimentConfig:
    """Parse and fully validate an experiment document, grid included."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON at line {e.lineno}: {e.msg}", field_path=str(path)) from e
    return parse_experiment_config(raw)


def parse_experiment_config(raw: Dict[str, Any]) -> ExperimentConfig:
    try:
        cfg = ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise config_error(e) from e
    cfg.run_configs()
    return cfg


class AggregateRow(BaseModel):
    """Across-seed summary of one (variant, environment) group."""

    algorithm: str
    env: str
    seeds: int
    mean: float
    std: Optional[float] = None
    variance: Optional[float] = None
    failure_rate: float = 0.0
    levene_p: Optional[float] = None
    time: float = 0.0
    params_ratio: Optional[float] = None
    success_rate: float = 0.0
    levene_w: Optional[float] = None
    levene_center: Optional[str] = None
    noisy_ratio: Optional[float] = None
    env_steps: float = 0.0
    diversity: Optional[float] = None
    undefined: List[str] = Field(default_factory=list)


class CurvePoint(BaseModel):
    episode: int
    phase: str = "train"
    mean: float
    std: Optional[float] = None


class AggregateReport(BaseModel):
    rows: List[AggregateRow] = Field(default_factory=list)
    curves: Dict[str, List[CurvePoint]] = Field(default_factory=dict)
    reference: Optional[str] = None
    levene_center: str = "median"

    def row(self, algorithm: str, env: Optional[str] = None) -> AggregateRow:
        for r in self.rows:
            if r.algorithm == algorithm and (env is None or r.env == env):
                return r
        raise KeyError(f"No aggregate row for {algorithm}" + (f" on {env}" if env else ""))
