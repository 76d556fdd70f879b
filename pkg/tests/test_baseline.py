import numpy as np
import pytest

from src.baseline import EpisodicBaseline, LearnedBaseline
from src.numerics import Rng


class TestEpisodicBaseline:
    def test_fresh_query_is_default(self):
        assert EpisodicBaseline().query(np.array([1.0, 2.0])) == 0.0

    def test_single_update(self):
        baseline = EpisodicBaseline(alpha=0.99)
        s = np.array([0.5])
        baseline.update_episodic([s], 1.0)
        assert baseline.query(s) == pytest.approx(0.01)

    def test_repeated_updates_match_recurrence(self):
        baseline = EpisodicBaseline(alpha=0.99)
        s = np.array([0.5])
        expected = 0.0
        for _ in range(500):
            baseline.update_episodic([s], 1.0)
            expected = 0.99 * expected + 0.01
        assert baseline.query(s) == pytest.approx(expected, rel=1e-12)
        assert baseline.query(s) == pytest.approx(1 - 0.99 ** 500)
        assert baseline.query(s) == pytest.approx(0.9934, abs=1e-4)

    def test_empty_visits(self):
        baseline = EpisodicBaseline()
        baseline.update_episodic([], 3.0)
        assert baseline.table == {}

    def test_first_visit_only(self):
        baseline = EpisodicBaseline(alpha=0.5)
        s = np.array([1.0])
        baseline.update_episodic([s, s, s], 4.0)
        assert baseline.query(s) == pytest.approx(2.0)

    def test_two_episodes(self):
        baseline = EpisodicBaseline(alpha=0.5)
        s = np.array([1.0])
        baseline.update_episodic([s], 0.0)
        baseline.update_episodic([s], 10.0)
        assert baseline.query(s) == pytest.approx(5.0)

    def test_rejects_nan_return(self):
        with pytest.raises(ValueError, match="finite"):
            EpisodicBaseline().update_episodic([np.zeros(1)], float("nan"))

    def test_custom_key(self):
        baseline = EpisodicBaseline(alpha=0.0, key_fn=lambda s: int(np.argmax(s)))
        baseline.update_episodic([np.array([0.0, 1.0])], 2.0)
        assert baseline.query(np.array([0.1, 0.9])) == 2.0

    def test_full_decay_keeps_table(self):
        baseline = EpisodicBaseline(alpha=1.0, default=0.25)
        seen, unseen = np.array([1.0]), np.array([2.0])
        baseline.table[baseline.key_fn(seen)] = 3.0
        for ret in (10.0, -4.0, 7.5):
            baseline.update_episodic([seen, unseen], ret)
        assert baseline.query(seen) == 3.0
        assert baseline.query(unseen) == 0.25

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.99])
    def test_update_between_old_value_and_return(self, alpha):
        baseline = EpisodicBaseline(alpha=alpha)
        s = np.array([0.0])
        rng = Rng(4)
        for ret in rng.normal(0.0, 10.0, 50):
            old = baseline.query(s)
            baseline.update_episodic([s], float(ret))
            new = baseline.query(s)
            assert min(old, ret) - 1e-12 <= new <= max(old, ret) + 1e-12


class TestLearnedBaseline:
    def test_exact_fit_has_zero_loss(self):
        baseline = LearnedBaseline(2, Rng(0), hidden=(4,))
        for a in baseline.net.arrays():
            a[...] = 0.0
        before = baseline.net.ravel().copy()
        loss = baseline.train_learned(np.ones((3, 2)), np.zeros(3))
        assert loss == 0.0
        assert np.array_equal(baseline.net.ravel(), before)

    def test_converges_on_constant(self):
        rng = Rng(1)
        baseline = LearnedBaseline(2, rng, hidden=(16,), lr=1e-2)
        loss = None
        for _ in range(2000):
            states = rng.uniform(-1.0, 1.0, size=(32, 2))
            loss = baseline.train_learned(states, np.full(32, 3.0))
        assert loss < 1e-3

    def test_observe_episode_trains_when_given_rng(self):
        baseline = LearnedBaseline(2, Rng(2), batch_size=8)
        assert baseline.observe_episode([np.zeros(2)] * 5, 1.0) is None
        loss = baseline.observe_episode([np.ones(2)] * 5, 2.0, rng=Rng(3))
        assert loss is not None and loss >= 0.0

    def test_parameter_count(self):
        assert LearnedBaseline(4, Rng(0), hidden=(32,)).parameter_count == 4 * 32 + 32 + 32 + 1
