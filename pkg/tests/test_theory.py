import json
import math

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from src.errors import ContractError
from src.numerics import Rng
from src.satcore import TabularMDP, random_mdp
from src.theory import (
    Empirical, Gaussian, GaussianMixture, ScalarDistribution, TheoryConfig, TwoPoint, Uniform,
    censored_normal_variance, check_boundedness, check_contraction, clip_variance_mc, exact_clip_report,
    random_distribution, variance_decomposition, verify_theory,
)


class TestDistributions:
    def test_discriminated_parse(self):
        dist = TypeAdapter(ScalarDistribution).validate_python({"kind": "uniform", "low": 0.0, "high": 2.0})
        assert isinstance(dist, Uniform)

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            TwoPoint(probs=(0.3, 0.3))

    def test_positive_scale(self):
        with pytest.raises(ValidationError):
            Gaussian(std=0.0)

    def test_mixture_lengths(self):
        with pytest.raises(ValidationError):
            GaussianMixture(weights=[1.0], means=[0.0, 1.0], stds=[1.0])

    def test_random_distributions_sample(self):
        rng = Rng(3)
        for _ in range(20):
            x = random_distribution(rng).sample(100, rng)
            assert x.shape == (100,) and np.all(np.isfinite(x))


class TestVarianceDecomposition:
    def test_two_point_by_hand(self):
        d = variance_decomposition(0.5, 0.0, 2.0, 0.0, 0.0, 1.0)
        assert d.var_y == pytest.approx(0.25)
        assert d.var_x == pytest.approx(1.0)
        assert d.reduction == pytest.approx(0.75)

    def test_no_mass_above(self):
        d = variance_decomposition(0.0, 3.0, None, 2.0, None, 10.0)
        assert d.var_y == d.var_x == 2.0
        assert d.reduction_formula == 0.0

    def test_all_mass_above(self):
        d = variance_decomposition(1.0, None, 4.0, None, 1.5, 2.0)
        assert d.var_y == 0.0
        assert d.var_x == 1.5

    @pytest.mark.parametrize("p", [-0.1, 1.2, float("nan")])
    def test_mass_out_of_range(self, p):
        with pytest.raises(ContractError, match="0, 1"):
            variance_decomposition(p, 0.0, 1.0, 1.0, 1.0, 0.5)

    def test_formula_is_the_difference(self):
        rng = Rng(4)
        for _ in range(200):
            p = float(rng.random())
            mu_le, mu_gt = float(rng.normal(0, 5)), float(rng.normal(0, 5))
            var_le, var_gt = float(rng.uniform(0, 4)), float(rng.uniform(0, 4))
            d = variance_decomposition(p, mu_le, mu_gt, var_le, var_gt, float(rng.normal()))
            assert abs(d.reduction - d.reduction_formula) < 1e-12 * max(1.0, d.var_x)


class TestClipVarianceMc:
    def test_two_point(self):
        report = clip_variance_mc(TwoPoint(), 1.0, 100_000, Rng(1))
        assert report.p == pytest.approx(0.5, abs=0.01)
        assert report.var_x == pytest.approx(1.0, abs=0.01)
        assert report.var_y == pytest.approx(0.25, abs=0.01)
        assert report.undefined == []

    def test_threshold_above_support(self):
        report = clip_variance_mc(TwoPoint(), 5.0, 10_000, Rng(1))
        assert report.p == 0.0
        assert report.var_y == report.var_x
        assert report.mu_gt is None and report.var_gt is None
        assert set(report.undefined) == {"mu_gt", "var_gt"}

    def test_threshold_below_support(self):
        report = clip_variance_mc(Uniform(low=1.0, high=2.0), 0.0, 10_000, Rng(1))
        assert report.p == 1.0
        assert report.var_y == 0.0
        assert set(report.undefined) == {"mu_le", "var_le"}

    def test_too_few_samples(self):
        with pytest.raises(ContractError, match="1000"):
            clip_variance_mc(TwoPoint(), 1.0, 999, Rng(1))

    def test_decomposition_exact_on_sample(self):
        rng = Rng(2)
        for _ in range(30):
            dist = random_distribution(rng)
            c = float(np.median(dist.sample(1000, rng)))
            r = clip_variance_mc(dist, c, 5000, rng)
            d = variance_decomposition(r.p, r.mu_le, r.mu_gt, r.var_le, r.var_gt, c)
            assert d.var_y == pytest.approx(r.var_y, rel=1e-9)
            assert d.var_x == pytest.approx(r.var_x, rel=1e-9)

    def test_non_increase_sweep(self):
        rng = Rng(5)
        n = 10_000
        for _ in range(100):
            dist = random_distribution(rng)
            c = float(np.quantile(dist.sample(1000, rng), rng.random()))
            r = clip_variance_mc(dist, c, n, rng)
            assert r.var_y <= r.var_x * (1 + 3 / math.sqrt(n))
            if r.p > 0.01:
                assert r.var_y < r.var_x


class TestExactLaws:
    def test_censored_standard_normal(self):
        assert censored_normal_variance(0.0, 1.0, 0.0) == pytest.approx(0.5 * (1 - 1 / math.pi), rel=1e-12)

    def test_censored_normal_against_sampling(self):
        rng = Rng(6)
        y = np.minimum(rng.normal(1.0, 2.0, size=1_000_000), 0.5)
        dev2 = (y - y.mean()) ** 2
        se = dev2.std() / math.sqrt(y.size)
        assert abs(dev2.mean() - censored_normal_variance(1.0, 2.0, 0.5)) < 3 * se

    def test_gaussian_exact_report(self):
        report = exact_clip_report(Gaussian(), 0.0)
        assert report.p == pytest.approx(0.5)
        assert report.var_x == pytest.approx(1.0)
        assert report.var_y == pytest.approx(censored_normal_variance(0.0, 1.0, 0.0))

    def test_uniform_exact_matches_sampling(self):
        exact = exact_clip_report(Uniform(), 0.5)
        assert exact.var_y == pytest.approx(1 / 96 + 1 / 64)
        mc = clip_variance_mc(Uniform(), 0.5, 1_000_000, Rng(7))
        assert mc.var_y == pytest.approx(exact.var_y, rel=0.01)
        assert mc.var_x == pytest.approx(exact.var_x, rel=0.01)

    def test_empirical_exact_equals_population(self):
        samples = [0.0, 1.0, 1.0, 4.0, 7.0]
        report = exact_clip_report(Empirical(samples=samples), 2.0)
        assert report.var_x == pytest.approx(np.var(samples))
        assert report.var_y == pytest.approx(np.var(np.minimum(samples, 2.0)))

    def test_mixture_has_no_exact_moments(self):
        with pytest.raises(ContractError):
            exact_clip_report(GaussianMixture(), 0.0)


class TestContraction:
    def test_zero_discount(self):
        rng = Rng(8)
        assert check_contraction(random_mdp(5, 2, rng), 0.0, 0.5, 0.0, 50, rng).max_ratio == 0.0

    def test_random_mdp_ratio(self):
        rng = Rng(9)
        result = check_contraction(random_mdp(20, 4, rng), 0.3, 0.5, 0.99, 1000, rng)
        assert result.max_ratio <= 0.99 + 1e-12
        assert result.trials == 1000

    def test_boundedness(self):
        rng = Rng(10)
        result = check_boundedness(random_mdp(8, 3, rng), 0.2, 0.5, 0.99)
        assert result.final_gap < 1e-10
        assert result.clipped_ok and result.value_bound_ok

    def test_printed_bound_can_fail(self):
        mdp = TabularMDP(np.full((2, 1, 2), 0.5), np.ones((2, 1)))
        result = check_boundedness(mdp, 0.0, 0.5, 0.99)
        assert result.max_q == pytest.approx(1.0 + 0.99 * 0.5)
        assert result.clipped_ok
        assert not result.printed_bound_ok


class TestVerifyTheory:
    def test_quick_suite_passes(self, tmp_path):
        cfg = TheoryConfig(seed=1, variance_pairs=20, variance_samples=2000, oracle_samples=100_000,
                           contraction_mdps=5, gradient_nets=3)
        report = verify_theory(cfg, output_dir=str(tmp_path))
        assert [c.name for c in report.checks] == [
            "variance_non_increase", "variance_decomposition", "exact_laws", "contraction", "gradients",
        ]
        assert report.passed, [c.detail for c in report.checks if not c.passed]
        summary = json.loads((tmp_path / "theory_summary.json").read_text())
        assert summary["passed"] is True
        assert len(summary["checks"]) == 5
