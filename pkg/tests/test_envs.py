import math

import numpy as np
import pytest

from src.envs import (
    Acrobot, CartPole, EnvSpec, GridWorld, GridWorldConfig, NoiseConfig, cartpole_dynamics,
    gridworld_optimal, make_env, transition_model,
)
from src.errors import ContractError
from src.numerics import Rng


class TestGridWorld:
    def test_reset_is_start_corner(self, rng):
        env = GridWorld()
        obs = env.reset(rng)
        assert obs.shape == (64,)
        assert obs[0] == 1.0 and obs.sum() == 1.0

    def test_index_encoding(self, rng):
        env = GridWorld(encoding="index")
        assert env.reset(rng).tolist() == [0.0]
        assert env.observation_dim == 1

    def test_deterministic_move_right(self, rng):
        env = GridWorld(GridWorldConfig(slip_prob=0.0), encoding="index")
        env.reset(rng)
        result = env.step(1, rng)
        assert result.next_state[0] == 1.0
        assert result.reward == pytest.approx(-0.01)
        assert not result.done

    def test_walls_clamp(self, rng):
        env = GridWorld(GridWorldConfig(slip_prob=0.0), encoding="index")
        env.reset(rng)
        assert env.step(0, rng).next_state[0] == 0.0

    def test_slip_frequency(self):
        env = GridWorld(GridWorldConfig(slip_prob=0.2), encoding="index")
        rng = Rng(5)
        intended = 0
        n = 100_000
        for _ in range(n):
            env.reset(rng)
            if env.step(1, rng).next_state[0] == 1.0:
                intended += 1
        # slipping "down" also moves, "up" and "left" clamp to the start cell
        assert intended / n == pytest.approx(0.8, abs=0.01)

    def test_goal_is_terminal_success(self, rng):
        cfg = GridWorldConfig(size=2, slip_prob=0.0)
        env = GridWorld(cfg, encoding="index")
        env.reset(rng)
        env.step(1, rng)
        result = env.step(2, rng)
        assert result.done and result.success
        assert result.reward == pytest.approx(1.0 - 0.01)

    def test_step_after_done(self, rng):
        cfg = GridWorldConfig(size=2, slip_prob=0.0)
        env = GridWorld(cfg, encoding="index")
        env.reset(rng)
        env.step(1, rng)
        env.step(2, rng)
        with pytest.raises(ContractError, match="finished episode"):
            env.step(0, rng)

    def test_invalid_action(self, rng):
        env = GridWorld()
        env.reset(rng)
        with pytest.raises(ContractError):
            env.step(4, rng)

    def test_start_equals_goal_rejected(self):
        with pytest.raises(ValueError):
            GridWorldConfig(size=3, start=(2, 2))

    def test_kernel_rows_sum_to_one(self):
        P, _ = transition_model(GridWorldConfig(slip_prob=0.3))
        assert np.allclose(P.sum(axis=2), 1.0)

    def test_truncation_at_cap(self, rng):
        env = GridWorld(GridWorldConfig(slip_prob=0.0, max_steps=3), encoding="index")
        env.reset(rng)
        results = [env.step(0, rng) for _ in range(3)]
        assert results[-1].done and results[-1].truncated and not results[-1].success


class TestGridWorldOptimal:
    def test_deterministic_shortest_path(self):
        value, policy, _ = gridworld_optimal(GridWorldConfig(slip_prob=0.0))
        assert value == pytest.approx(0.86, abs=1e-9)
        assert policy[0] in (1, 2)

    def test_slip_lowers_value(self):
        assert gridworld_optimal(GridWorldConfig(slip_prob=0.2))[0] < 0.86

    def test_rollout_agrees_with_value(self):
        cfg = GridWorldConfig(slip_prob=0.2, max_steps=10_000)
        value, policy, _ = gridworld_optimal(cfg)
        env = GridWorld(cfg, encoding="index")
        rng = Rng(9)
        returns = []
        for _ in range(20_000):
            state = env.reset(rng)
            total = 0.0
            while True:
                result = env.step(int(policy[int(state[0])]), rng)
                total += result.reward
                if result.done:
                    break
                state = result.next_state
            returns.append(total)
        se = np.std(returns) / math.sqrt(len(returns))
        assert abs(np.mean(returns) - value) < 3.0 * se


class TestCartPole:
    def test_reset_deterministic(self):
        a = CartPole().reset(Rng(2))
        b = CartPole().reset(Rng(2))
        assert np.array_equal(a, b)
        assert np.all(np.abs(a) <= 0.05)

    def test_constant_push_falls(self, rng):
        env = CartPole()
        state = env.reset(rng)
        total, steps = 0.0, 0
        expected = state.copy()
        while True:
            result = env.step(0, rng)
            expected = cartpole_dynamics(expected, 0)
            assert np.allclose(result.next_state, expected)
            total += result.reward
            steps += 1
            if result.done:
                break
        assert steps < 500
        assert total == steps
        assert not result.success

    def test_action_noise_changes_actions(self):
        clean, noisy = CartPole(), CartPole(NoiseConfig(action_noise_prob=1.0))
        a, b = Rng(4), Rng(4)
        clean.reset(a)
        noisy.reset(b)
        diverged = False
        for _ in range(10):
            r1, r2 = clean.step(1, a), noisy.step(1, b)
            if not np.allclose(r1.next_state, r2.next_state):
                diverged = True
                break
            if r1.done or r2.done:
                break
        assert diverged


class TestAcrobot:
    def test_reset_bounds(self, rng):
        obs = Acrobot().reset(rng)
        assert obs.shape == (6,)
        assert obs[0] ** 2 + obs[1] ** 2 == pytest.approx(1.0)
        assert obs[2] ** 2 + obs[3] ** 2 == pytest.approx(1.0)
        assert np.all(np.abs(obs[4:]) <= 0.1)

    def test_idle_episode_hits_floor(self, rng):
        env = Acrobot(max_steps=50)
        env.reset(rng)
        total = 0.0
        while True:
            result = env.step(1, rng)
            total += result.reward
            if result.done:
                break
        assert total == -50.0
        assert result.truncated
        assert env.return_floor == -50.0


class TestRegistry:
    def test_make_env_per_name(self):
        assert isinstance(make_env(EnvSpec(name="gridworld")), GridWorld)
        assert isinstance(make_env(EnvSpec(name="cartpole")), CartPole)
        assert isinstance(make_env(EnvSpec(name="acrobot")), Acrobot)

    def test_noise_override(self):
        env = make_env(EnvSpec(name="cartpole"), action_noise_prob=0.1)
        assert env.noise.action_noise_prob == 0.1

    def test_default_budgets(self):
        assert EnvSpec(name="gridworld").default_total_steps == 10_000
        assert EnvSpec(name="cartpole").default_total_steps == 20_000

    def test_same_seed_same_trajectory(self):
        def rollout():
            env, rng = make_env(EnvSpec(name="gridworld")), Rng(21)
            env.reset(rng)
            return [env.step(a % 4, rng).reward for a in range(30) if not env.done]
        assert rollout() == rollout()
