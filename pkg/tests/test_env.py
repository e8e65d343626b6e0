from __future__ import annotations

import math

import numpy as np
import pytest

from safebench.config import EnvConfig
from safebench.env import Circle2DEnv, episode_return, reward_at
from safebench.geometry import build_geometry, in_cost_region


def test_reset_bounds_and_feasibility():
    env = Circle2DEnv(EnvConfig(level=1))
    for seed in range(10_000):
        env.reset(seed=seed)
        x, y = env.position
        assert 10.5 <= x <= 15.0
        assert -2.5 <= y <= 2.5
        assert not in_cost_region(env.geometry, env.position)


def test_reset_determinism():
    env_a = Circle2DEnv(EnvConfig(level=1))
    env_b = Circle2DEnv(EnvConfig(level=1))
    assert np.array_equal(env_a.reset(seed=123), env_b.reset(seed=123))
    assert env_a.position == env_b.position
    different = {tuple(Circle2DEnv(EnvConfig()).reset(seed=s)) for s in range(20)}
    assert len(different) > 1


def test_observation_is_normalized_position():
    env = Circle2DEnv(EnvConfig(level=1))
    obs = env.reset(seed=5)
    x, y = env.position
    assert obs == pytest.approx([x / 15.0, y / 15.0])


def test_step_stream_determinism():
    cfg = EnvConfig(level=2)
    actions = np.random.default_rng(0).uniform(-1, 1, size=(120, 2))
    streams = []
    for _ in range(2):
        env = Circle2DEnv(cfg)
        env.reset(seed=99)
        stream = []
        for action in actions:
            r = env.step(action)
            stream.append((tuple(r.observation), r.reward, r.cost, r.terminated, r.truncated))
            if r.terminated or r.truncated:
                env.reset(seed=77)
        streams.append(stream)
    assert streams[0] == streams[1]


def test_level0_revert_example():
    cfg = EnvConfig(level=0, step_size=0.5)
    env = Circle2DEnv(cfg)
    env.reset(seed=0, position=(10.2, 0.0))
    result = env.step((-1.0, 0.0))
    assert result.cost == 1.0
    assert result.position == (10.2, 0.0)
    assert result.observation == pytest.approx([10.2 / 15.0, 0.0])


def test_level1_same_move_penetrates():
    cfg = EnvConfig(level=1, step_size=0.5)
    env = Circle2DEnv(cfg)
    env.reset(seed=0, position=(10.2, 0.0))
    result = env.step((-1.0, 0.0))
    assert result.cost == 1.0
    assert result.position == pytest.approx((9.7, 0.0))


def test_zero_action_is_free():
    for level in (0, 1, 2, 3):
        env = Circle2DEnv(EnvConfig(level=level))
        env.reset(seed=3)
        before = env.position
        result = env.step((0.0, 0.0))
        assert result.cost == 0.0
        assert result.position == before


def test_truncation_at_episode_cap():
    env = Circle2DEnv(EnvConfig(level=1, max_episode_steps=50))
    env.reset(seed=1)
    for t in range(50):
        result = env.step((0.0, 0.0))
        assert result.truncated == (t == 49)
    with pytest.raises(RuntimeError):
        env.step((0.0, 0.0))


def test_step_before_reset_rejected():
    env = Circle2DEnv(EnvConfig(level=1))
    with pytest.raises(RuntimeError):
        env.step((0.0, 0.0))


def test_reset_on_cost_terminates_with_single_cost():
    env = Circle2DEnv(EnvConfig(level=1, reset_on_cost=True))
    for seed in range(30):
        env.reset(seed=seed)
        total_cost = 0.0
        while True:
            result = env.step((-1.0, 0.0))
            total_cost += result.cost
            if result.terminated or result.truncated:
                break
        assert total_cost <= 1.0
        if result.terminated:
            assert result.cost == 1.0


def test_level0_random_fuzz_never_enters_region():
    env = Circle2DEnv(EnvConfig(level=0))
    rng = np.random.default_rng(11)
    env.reset(seed=0)
    for _ in range(3000):
        before = env.position
        result = env.step(rng.uniform(-1, 1, 2))
        assert not in_cost_region(env.geometry, result.position)
        if result.cost:
            assert result.position == before
        if result.terminated or result.truncated:
            env.reset(seed=int(rng.integers(1 << 30)))


def test_cost_matches_region_membership_when_penetrable():
    for level in (1, 2, 3):
        env = Circle2DEnv(EnvConfig(level=level))
        rng = np.random.default_rng(level)
        env.reset(seed=0)
        for _ in range(2000):
            result = env.step(rng.uniform(-1, 1, 2))
            assert result.cost == float(in_cost_region(env.geometry, result.position))
            if result.terminated or result.truncated:
                env.reset(seed=int(rng.integers(1 << 30)))


def test_nonpenetratable_flag_applies_to_other_levels():
    cfg = EnvConfig(level=2, infeasible_region_penetratable=False, step_size=0.5)
    env = Circle2DEnv(cfg)
    env.reset(seed=0, position=(10.2, 0.0))
    result = env.step((-1.0, 0.0))
    assert result.cost == 1.0
    assert result.position == (10.2, 0.0)


def test_arena_clamp():
    env = Circle2DEnv(EnvConfig(level=1))
    env.reset(seed=0, position=(14.9, 0.0))
    for _ in range(10):
        result = env.step((1.0, 1.0))
    assert result.position[0] == 15.0
    assert result.position[1] <= 15.0


def test_reward_examples():
    cfg = EnvConfig(level=1)
    geom = build_geometry(cfg)
    assert reward_at(cfg, geom, (15.0, 0.0)) == pytest.approx(-1.0)
    assert reward_at(cfg, geom, (-2.0, 0.0)) == pytest.approx(-2.0 / 15.0)
    sparse = EnvConfig(level=1, sparse_reward=True)
    sparse_geom = build_geometry(sparse)
    assert reward_at(sparse, sparse_geom, (12.0, 0.0)) == 0.0
    assert reward_at(sparse, sparse_geom, (-5.0, 0.0)) == pytest.approx(-5.0 / 15.0)


def test_reward_monotone_in_distance():
    cfg = EnvConfig(level=1)
    geom = build_geometry(cfg)
    rng = np.random.default_rng(2)
    for _ in range(200):
        angle = rng.uniform(0, 2 * math.pi)
        r1, r2 = sorted(rng.uniform(0.0, 15.0, 2))
        if r1 == r2:
            continue
        near = (r1 * math.cos(angle), r1 * math.sin(angle))
        far = (r2 * math.cos(angle), r2 * math.sin(angle))
        assert reward_at(cfg, geom, near) > reward_at(cfg, geom, far)
    assert reward_at(cfg, geom, geom.infeasible_optimum) == 0.0


def test_episode_return_examples():
    assert episode_return([-1.0], 0.0) == -1.0
    assert episode_return([-1.0] * 5, 1.0) == -5.0
    # closed-form geometric series as the oracle
    expected = -0.29 * (1 - 0.99**50) / (1 - 0.99)
    assert episode_return([-0.29] * 50, 0.99) == pytest.approx(expected, rel=1e-12)
    assert episode_return([], 0.5) == 0.0


def test_sparse_reward_inside_cutout_is_dense_value():
    cfg = EnvConfig(level=2, sparse_reward=True)
    geom = build_geometry(cfg)
    assert reward_at(cfg, geom, (0.0, 7.5)) == pytest.approx(-7.5 / 15.0)
