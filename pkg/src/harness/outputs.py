import logging
import math
import os
from pathlib import Path
from typing import Iterable, List

import pandas as pd

from .models import AggregateReport, AggregateRow, CurvePoint

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "algorithm", "env", "seeds", "mean", "std", "variance", "failure_rate", "levene_p", "time",
    "params_ratio", "success_rate", "levene_w", "levene_center", "noisy_ratio",
]
CURVE_COLUMNS = ["episode", "phase", "mean", "std"]
FORMATS = ("csv", "plot-data")


def ensure_writable(output_dir) -> Path:
    """Create the directory if needed and fail now if nothing can be written there."""
    path = Path(output_dir)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK | os.X_OK):
        raise PermissionError(f"Output directory is not writable: {path}")
    return path


def summary_frame(report: AggregateReport) -> pd.DataFrame:
    records = [row.model_dump(include=set(SUMMARY_COLUMNS)) for row in report.rows]
    return pd.DataFrame.from_records(records, columns=SUMMARY_COLUMNS)


def emit_outputs(report: AggregateReport, output_dir, formats: Iterable[str] = FORMATS) -> List[Path]:
    """Write `summary.csv` and/or one curve file per (variant, env) under `curves/`."""
    formats = list(formats)
    unknown = [f for f in formats if f not in FORMATS]
    if unknown:
        raise ValueError(f"Unknown output format(s): {unknown}")
    root = ensure_writable(output_dir)
    written: List[Path] = []

    if "csv" in formats:
        path = root / "summary.csv"
        summary_frame(report).to_csv(path, index=False)
        written.append(path)

    if "plot-data" in formats:
        curve_dir = root / "curves"
        curve_dir.mkdir(exist_ok=True)
        for key, points in report.curves.items():
            frame = pd.DataFrame.from_records([p.model_dump() for p in points], columns=CURVE_COLUMNS)
            path = curve_dir / f"{key}.csv"
            frame.to_csv(path, index=False)
            written.append(path)

    logger.info(f"Wrote {len(written)} output file(s) to {root}")
    return written


def _native(value):
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def read_summary_csv(path) -> List[AggregateRow]:
    frame = pd.read_csv(path, float_precision="round_trip")
    return [AggregateRow(**{k: _native(v) for k, v in row.items()}) for row in frame.to_dict(orient="records")]


def read_curve_csv(path) -> List[CurvePoint]:
    frame = pd.read_csv(path, float_precision="round_trip")
    return [CurvePoint(**{k: _native(v) for k, v in row.items()}) for row in frame.to_dict(orient="records")]
