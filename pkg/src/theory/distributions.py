from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import stats


class _Distribution(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    exact_moments: bool = False

    def sample(self, n: int, rng) -> np.ndarray:
        raise NotImplementedError

    def conditional_stats(self, c: float):
        """Exact (p, mu_le, mu_gt, var_le, var_gt) for threshold c, None where undefined."""
        raise NotImplementedError

    @property
    def support_max(self) -> float:
        return float("inf")


class TwoPoint(_Distribution):
    kind: Literal["two_point"] = "two_point"
    values: Tuple[float, float] = (0.0, 2.0)
    probs: Tuple[float, float] = (0.5, 0.5)
    exact_moments: bool = True

    @model_validator(mode="after")
    def _check(self):
        if min(self.probs) < 0 or abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"Two-point probabilities must be nonnegative and sum to 1: {self.probs}")
        return self

    def sample(self, n: int, rng) -> np.ndarray:
        pick = rng.random(n) < self.probs[1]
        return np.where(pick, self.values[1], self.values[0]).astype(np.float64)

    def conditional_stats(self, c: float):
        return _discrete_conditional(np.array(self.values), np.array(self.probs), c)

    @property
    def support_max(self) -> float:
        return max(v for v, p in zip(self.values, self.probs) if p > 0)


class Uniform(_Distribution):
    kind: Literal["uniform"] = "uniform"
    low: float = 0.0
    high: float = 1.0
    exact_moments: bool = True

    @model_validator(mode="after")
    def _check(self):
        if not self.high > self.low:
            raise ValueError(f"Uniform needs high > low, got [{self.low}, {self.high}]")
        return self

    def sample(self, n: int, rng) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=n)

    def conditional_stats(self, c: float):
        width = self.high - self.low
        p = float(np.clip((self.high - c) / width, 0.0, 1.0))
        below = (self.low, min(c, self.high))
        above = (max(c, self.low), self.high)
        mu_le = (below[0] + below[1]) / 2 if p < 1 else None
        var_le = (below[1] - below[0]) ** 2 / 12 if p < 1 else None
        mu_gt = (above[0] + above[1]) / 2 if p > 0 else None
        var_gt = (above[1] - above[0]) ** 2 / 12 if p > 0 else None
        return p, mu_le, mu_gt, var_le, var_gt

    @property
    def support_max(self) -> float:
        return self.high


class Gaussian(_Distribution):
    kind: Literal["gaussian"] = "gaussian"
    mean: float = 0.0
    std: float = Field(1.0, gt=0.0)
    exact_moments: bool = True

    def sample(self, n: int, rng) -> np.ndarray:
        return rng.normal(self.mean, self.std, size=n)

    def conditional_stats(self, c: float):
        """Truncated-normal moments on either side of c."""
        a = (c - self.mean) / self.std
        pdf, cdf, sf = stats.norm.pdf(a), stats.norm.cdf(a), stats.norm.sf(a)
        p = float(sf)
        mu_le = var_le = mu_gt = var_gt = None
        if cdf > 0:
            lam = pdf / cdf
            mu_le = self.mean - self.std * lam
            var_le = self.std ** 2 * (1 - a * lam - lam ** 2)
        if sf > 0:
            lam = pdf / sf
            mu_gt = self.mean + self.std * lam
            var_gt = self.std ** 2 * (1 + a * lam - lam ** 2)
        return p, mu_le, mu_gt, var_le, var_gt


class GaussianMixture(_Distribution):
    kind: Literal["gaussian_mixture"] = "gaussian_mixture"
    weights: List[float] = [0.5, 0.5]
    means: List[float] = [-1.0, 1.0]
    stds: List[float] = [1.0, 1.0]

    @model_validator(mode="after")
    def _check(self):
        if not (len(self.weights) == len(self.means) == len(self.stds)) or not self.weights:
            raise ValueError("Mixture weights, means and stds must have the same nonzero length")
        if min(self.weights) < 0 or abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"Mixture weights must be nonnegative and sum to 1: {self.weights}")
        if min(self.stds) <= 0:
            raise ValueError("Mixture scales must be positive")
        return self

    def sample(self, n: int, rng) -> np.ndarray:
        comp = np.searchsorted(np.cumsum(self.weights), rng.random(n), side="right")
        comp = np.minimum(comp, len(self.weights) - 1)
        return rng.normal(np.asarray(self.means)[comp], np.asarray(self.stds)[comp])


class Empirical(_Distribution):
    kind: Literal["empirical"] = "empirical"
    samples: List[float]
    exact_moments: bool = True

    @model_validator(mode="after")
    def _check(self):
        if not self.samples:
            raise ValueError("Empirical distribution needs at least one sample")
        return self

    def sample(self, n: int, rng) -> np.ndarray:
        data = np.asarray(self.samples, dtype=np.float64)
        return data[rng.integers(0, len(data), size=n)]

    def conditional_stats(self, c: float):
        values, counts = np.unique(np.asarray(self.samples, dtype=np.float64), return_counts=True)
        return _discrete_conditional(values, counts / counts.sum(), c)

    @property
    def support_max(self) -> float:
        return float(max(self.samples))


ScalarDistribution = Annotated[
    Union[TwoPoint, Uniform, Gaussian, GaussianMixture, Empirical],
    Field(discriminator="kind"),
]


def _discrete_conditional(values: np.ndarray, probs: np.ndarray, c: float):
    above = values > c
    p = float(probs[above].sum())

    def _moments(mask) -> Tuple[Optional[float], Optional[float]]:
        mass = probs[mask].sum()
        if mass <= 0:
            return None, None
        mu = float((probs[mask] * values[mask]).sum() / mass)
        var = float((probs[mask] * (values[mask] - mu) ** 2).sum() / mass)
        return mu, var

    mu_le, var_le = _moments(~above)
    mu_gt, var_gt = _moments(above)
    return p, mu_le, mu_gt, var_le, var_gt


def random_distribution(rng) -> Union[TwoPoint, Uniform, Gaussian, GaussianMixture]:
    """A randomly parameterized distribution for the variance non-increase sweep."""
    kind = int(rng.integers(4))
    if kind == 0:
        lo = float(rng.normal(0.0, 5.0))
        q = float(rng.uniform(0.05, 0.95))
        return TwoPoint(values=(lo, lo + float(rng.uniform(0.1, 10.0))), probs=(1.0 - q, q))
    if kind == 1:
        lo = float(rng.normal(0.0, 5.0))
        return Uniform(low=lo, high=lo + float(rng.uniform(0.1, 10.0)))
    if kind == 2:
        return Gaussian(mean=float(rng.normal(0.0, 5.0)), std=float(rng.uniform(0.1, 5.0)))
    n_comp = int(rng.integers(2, 5))
    weights = rng.dirichlet(np.ones(n_comp))
    return GaussianMixture(weights=weights.tolist(),
                           means=rng.normal(0.0, 5.0, size=n_comp).tolist(),
                           stds=rng.uniform(0.1, 3.0, size=n_comp).tolist())
