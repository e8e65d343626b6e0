from __future__ import annotations

import io

import numpy as np
import pytest

from safebench.config import EnvConfig
from safebench.env import Circle2DEnv
from safebench.policies import PolicySpec
from safebench.rollout_log import group_rollouts, read_log
from safebench.runner import run_experiment


def run_to_buffer(total_steps=500, episodes_per_rollout=1, seed=0,
                  policy_kind="greedy_through", **env_kwargs):
    cfg = EnvConfig(level=1, **env_kwargs)
    buf = io.StringIO()
    summary = run_experiment(
        cfg, PolicySpec(kind=policy_kind), episodes_per_rollout, total_steps, seed, buf
    )
    return cfg, buf, summary


def test_rollout_count_for_equal_episodes():
    _, buf, summary = run_to_buffer(total_steps=500, episodes_per_rollout=1)
    assert summary.rollouts == 10
    assert summary.episodes == 10
    assert summary.steps == 500
    buf.seek(0)
    groups = group_rollouts(read_log(buf))
    assert [g.rollout_id for g in groups] == list(range(10))


def test_identical_seeds_give_identical_logs():
    _, buf_a, _ = run_to_buffer(seed=7, policy_kind="random")
    _, buf_b, _ = run_to_buffer(seed=7, policy_kind="random")
    assert buf_a.getvalue() == buf_b.getvalue()
    _, buf_c, _ = run_to_buffer(seed=8, policy_kind="random")
    assert buf_a.getvalue() != buf_c.getvalue()


def test_rollout_grouping_with_partial_tail():
    _, buf, summary = run_to_buffer(total_steps=1100, episodes_per_rollout=10)
    buf.seek(0)
    groups = group_rollouts(read_log(buf))
    assert [len(g.episodes) for g in groups] == [10, 10, 2]
    assert summary.steps == 1100


def test_headers_reproduce_episodes():
    cfg, buf, _ = run_to_buffer(total_steps=200, policy_kind="random", seed=3)
    buf.seek(0)
    episodes = read_log(buf)
    env = Circle2DEnv(cfg)
    for header, steps in episodes:
        env.reset(seed=header.seed)
        for step in steps:
            result = env.step(step.action)
            assert result.reward == step.reward
            assert result.cost == step.cost
            assert tuple(result.observation) == step.observation


def test_reset_on_cost_short_episodes():
    _, buf, summary = run_to_buffer(
        total_steps=60, episodes_per_rollout=5, reset_on_cost=True
    )
    buf.seek(0)
    episodes = read_log(buf)
    assert summary.steps >= 60
    for _, steps in episodes:
        assert sum(s.cost for s in steps) <= 1.0


def test_bad_arguments_rejected():
    cfg = EnvConfig(level=1)
    with pytest.raises(ValueError):
        run_experiment(cfg, PolicySpec(kind="random"), 1, 0, 0, io.StringIO())
    with pytest.raises(ValueError):
        run_experiment(cfg, PolicySpec(kind="random"), 0, 10, 0, io.StringIO())
