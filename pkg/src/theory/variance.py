import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel
from scipy import stats

from src.errors import ContractError

logger = logging.getLogger(__name__)

MIN_SAMPLES = 1000


class VarianceReport(BaseModel):
    """Moments of X and Y = min(X, c) plus the conditional split at c.

    Conditional statistics on an empty side (p = 0 or p = 1) are None and
    named in `undefined`.
    """

    c: float
    n: Optional[int] = None
    p: float
    mu_le: Optional[float] = None
    mu_gt: Optional[float] = None
    var_le: Optional[float] = None
    var_gt: Optional[float] = None
    var_x: float
    var_y: float
    reduction: float
    undefined: List[str] = []

    @property
    def tolerance(self) -> float:
        """Monte Carlo slack on Var(X), the 3/sqrt(n) band."""
        if self.n is None:
            return 0.0
        return self.var_x * 3.0 / math.sqrt(self.n)


class Decomposition(NamedTuple):
    var_y: float
    var_x: float
    reduction: float
    reduction_formula: float


def variance_decomposition(p: float, mu_le: Optional[float], mu_gt: Optional[float],
                           var_le: Optional[float], var_gt: Optional[float], c: float) -> Decomposition:
    """Var(Y) and Var(X) rebuilt from the conditional split at threshold c.

    `reduction` is the plain difference of the two rebuilt variances and
    `reduction_formula` is the closed form
    p var_gt + p(1-p)[(mu_le - mu_gt)^2 - (mu_le - c)^2].
    Statistics of a side with zero mass may be None; their terms vanish.
    """
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ContractError(f"Mass above threshold must lie in [0, 1], got {p}")
    q = 1.0 - p
    if q > 0 and (mu_le is None or var_le is None):
        raise ContractError("Below-threshold statistics are required when p < 1")
    if p > 0 and (mu_gt is None or var_gt is None):
        raise ContractError("Above-threshold statistics are required when p > 0")
    mu_le_ = 0.0 if mu_le is None else mu_le
    mu_gt_ = 0.0 if mu_gt is None else mu_gt
    var_le_ = 0.0 if var_le is None else var_le
    var_gt_ = 0.0 if var_gt is None else var_gt

    var_y = q * var_le_ + p * q * (mu_le_ - c) ** 2
    var_x = q * var_le_ + p * var_gt_ + p * q * (mu_le_ - mu_gt_) ** 2
    formula = p * var_gt_ + p * q * ((mu_le_ - mu_gt_) ** 2 - (mu_le_ - c) ** 2)
    return Decomposition(var_y, var_x, var_x - var_y, formula)


def sample_split(x: np.ndarray, c: float):
    """Population conditional statistics of one sample on either side of c."""
    above = x > c
    n = x.size
    p = float(np.count_nonzero(above)) / n
    below_vals, above_vals = x[~above], x[above]
    mu_le = float(below_vals.mean()) if below_vals.size else None
    var_le = float(below_vals.var()) if below_vals.size else None
    mu_gt = float(above_vals.mean()) if above_vals.size else None
    var_gt = float(above_vals.var()) if above_vals.size else None
    return p, mu_le, mu_gt, var_le, var_gt


def _undefined_names(p: float):
    names = []
    if p >= 1.0:
        names += ["mu_le", "var_le"]
    if p <= 0.0:
        names += ["mu_gt", "var_gt"]
    return names


def clip_variance_mc(dist, c: float, n: int, rng) -> VarianceReport:
    """Monte Carlo report for Y = min(X, c) from a single shared sample of X."""
    if n < MIN_SAMPLES:
        raise ContractError(f"clip_variance_mc needs n >= {MIN_SAMPLES}, got {n}")
    x = np.asarray(dist.sample(n, rng), dtype=np.float64)
    y = np.minimum(x, c)
    p, mu_le, mu_gt, var_le, var_gt = sample_split(x, c)
    var_x, var_y = float(x.var()), float(y.var())
    undefined = _undefined_names(p)
    if undefined:
        logger.debug(f"Degenerate split at c={c}: {', '.join(undefined)} undefined")
    return VarianceReport(c=c, n=n, p=p, mu_le=mu_le, mu_gt=mu_gt, var_le=var_le, var_gt=var_gt,
                          var_x=var_x, var_y=var_y, reduction=var_x - var_y, undefined=undefined)


def exact_clip_report(dist, c: float) -> VarianceReport:
    """Closed-form report for distributions with exact conditional moments."""
    if not dist.exact_moments:
        raise ContractError(f"{dist.kind} has no exact conditional moments")
    p, mu_le, mu_gt, var_le, var_gt = dist.conditional_stats(c)
    d = variance_decomposition(p, mu_le, mu_gt, var_le, var_gt, c)
    return VarianceReport(c=c, p=p, mu_le=mu_le, mu_gt=mu_gt, var_le=var_le, var_gt=var_gt,
                          var_x=d.var_x, var_y=d.var_y, reduction=d.reduction,
                          undefined=_undefined_names(p))


def censored_normal_variance(mean: float, std: float, c: float) -> float:
    """Var(min(X, c)) for X ~ N(mean, std^2)."""
    a = (c - mean) / std
    pdf, cdf, sf = stats.norm.pdf(a), stats.norm.cdf(a), stats.norm.sf(a)
    # E[Z 1{Z<=a}] = -pdf, E[Z^2 1{Z<=a}] = cdf - a pdf
    m1 = -pdf + a * sf
    m2 = (cdf - a * pdf) + a * a * sf
    return float(std * std * (m2 - m1 * m1))
