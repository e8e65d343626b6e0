from __future__ import annotations

import io
import json

import numpy as np
import pytest

from safebench.config import ConfigError
from safebench.rollout_log import (
    EpisodeHeader,
    LogError,
    StepRecord,
    adapt_foreign_log,
    group_rollouts,
    read_log,
    write_episode,
)


def make_step(t, reward=-0.5, cost=0.0, terminated=False, truncated=False):
    return StepRecord(
        t=t,
        observation=(0.1 * t, -0.2),
        action=(1.0, -1.0),
        reward=reward,
        cost=cost,
        terminated=terminated,
        truncated=truncated,
    )


def make_episode(episode_id=0, rollout_id=0, length=3):
    steps = [make_step(t, truncated=(t == length - 1)) for t in range(length)]
    header = EpisodeHeader(
        episode_id=episode_id,
        rollout_id=rollout_id,
        seed=7,
        env_config_digest="abc123",
        length=length,
    )
    return header, steps


def random_episode(rng, episode_id, rollout_id):
    length = int(rng.integers(1, 12))
    steps = []
    for t in range(length):
        # adversarial float values must survive the round trip bit for bit
        reward = float(rng.normal() * 10 ** int(rng.integers(-12, 12)))
        steps.append(
            StepRecord(
                t=t,
                observation=tuple(rng.normal(size=2)),
                action=tuple(rng.uniform(-1, 1, size=2)),
                reward=reward,
                cost=float(rng.integers(0, 2)),
                terminated=False,
                truncated=(t == length - 1) and bool(rng.integers(0, 2)),
            )
        )
    header = EpisodeHeader(
        episode_id=episode_id,
        rollout_id=rollout_id,
        seed=int(rng.integers(0, 2**31)),
        env_config_digest="d" * 16,
        length=length,
    )
    return header, steps


def test_single_step_episode_is_two_lines():
    buf = io.StringIO()
    header, steps = make_episode(length=1)
    write_episode(buf, header, steps)
    assert len(buf.getvalue().strip().split("\n")) == 2


def test_round_trip_identity():
    rng = np.random.default_rng(0)
    for trial in range(30):
        episodes = [
            random_episode(rng, episode_id=i, rollout_id=i // 3) for i in range(6)
        ]
        buf = io.StringIO()
        for header, steps in episodes:
            write_episode(buf, header, steps)
        buf.seek(0)
        assert read_log(buf) == episodes


def test_round_trip_is_byte_stable():
    header, steps = make_episode()
    buf_a, buf_b = io.StringIO(), io.StringIO()
    write_episode(buf_a, header, steps)
    write_episode(buf_b, header, steps)
    assert buf_a.getvalue() == buf_b.getvalue()


def test_length_mismatch_writes_nothing():
    buf = io.StringIO()
    header, steps = make_episode(length=3)
    bad_header = EpisodeHeader(
        episode_id=0, rollout_id=0, seed=7, env_config_digest="abc", length=2
    )
    with pytest.raises(LogError):
        write_episode(buf, bad_header, steps)
    assert buf.getvalue() == ""


def test_terminal_flag_mid_episode_rejected():
    buf = io.StringIO()
    header, _ = make_episode(length=3)
    steps = [make_step(0, truncated=True), make_step(1), make_step(2, truncated=True)]
    with pytest.raises(LogError):
        write_episode(buf, header, steps)


def test_empty_file_reads_empty():
    assert read_log(io.StringIO("")) == []


def test_truncated_final_episode_names_the_episode():
    buf = io.StringIO()
    header, steps = make_episode(episode_id=42, length=3)
    write_episode(buf, header, steps)
    content = "\n".join(buf.getvalue().strip().split("\n")[:-1])  # drop final step
    with pytest.raises(LogError, match="42"):
        read_log(io.StringIO(content))


def test_malformed_line_reports_line_number():
    header, steps = make_episode(length=2)
    buf = io.StringIO()
    write_episode(buf, header, steps)
    content = buf.getvalue() + "{not json\n"
    with pytest.raises(LogError, match="line 4"):
        read_log(io.StringIO(content))


def test_unknown_record_type_rejected():
    with pytest.raises(LogError, match="line 1"):
        read_log(io.StringIO('{"type":"mystery"}\n'))


def test_group_rollouts_cumulative_indices():
    rng = np.random.default_rng(1)
    episodes = []
    eid = 0
    for rollout_id in range(5):
        for _ in range(int(rng.integers(1, 4))):
            episodes.append(random_episode(rng, eid, rollout_id))
            eid += 1
    groups = group_rollouts(episodes)
    assert [g.rollout_id for g in groups] == list(range(5))
    # linear-scan oracle over episode lengths
    running = 0
    by_rollout = {}
    for header, steps in episodes:
        running += len(steps)
        by_rollout[header.rollout_id] = running
    for group in groups:
        assert group.cumulative_step_index == by_rollout[group.rollout_id]


def test_group_rollouts_requires_increasing_ids():
    episodes = [make_episode(0, rollout_id=1), make_episode(1, rollout_id=0)]
    with pytest.raises(LogError):
        group_rollouts(episodes)


def test_foreign_identity_mapping_on_native_log():
    rng = np.random.default_rng(2)
    episodes = [random_episode(rng, i, i) for i in range(4)]
    buf = io.StringIO()
    for header, steps in episodes:
        write_episode(buf, header, steps)
    buf.seek(0)
    mapping = {
        "reward": "reward",
        "cost": "cost",
        "terminated": "terminated",
        "truncated": "truncated",
        "observation": "observation",
        "action": "action",
    }
    assert adapt_foreign_log(buf, mapping) == episodes


def test_foreign_keys_preserve_costs():
    lines = []
    costs = [0.0, 2.5, 0.0, 1.0]
    for t, c in enumerate(costs):
        lines.append(json.dumps({"r": -1.0, "c": c, "done": t == len(costs) - 1}))
    source = io.StringIO("\n".join(lines) + "\n")
    episodes = adapt_foreign_log(source, {"reward": "r", "cost": "c", "terminated": "done"})
    assert len(episodes) == 1
    header, steps = episodes[0]
    assert [s.cost for s in steps] == costs
    assert header.length == 4
    assert steps[-1].terminated


def test_foreign_grouping_k_episodes_per_rollout():
    lines = []
    for _ in range(10):  # ten 2-step episodes
        lines.append(json.dumps({"r": 0.0, "c": 0.0, "done": False}))
        lines.append(json.dumps({"r": 0.0, "c": 1.0, "done": True}))
    source = io.StringIO("\n".join(lines) + "\n")
    episodes = adapt_foreign_log(
        source, {"reward": "r", "cost": "c", "terminated": "done"}, episodes_per_rollout=10
    )
    groups = group_rollouts(episodes)
    assert len(groups) == 1
    assert len(groups[0].episodes) == 10
    assert groups[0].cumulative_step_index == 20


def test_foreign_mapping_requires_core_fields():
    with pytest.raises(ConfigError):
        adapt_foreign_log(io.StringIO(""), {"reward": "r", "cost": "c"})


def test_foreign_trailing_open_episode_is_kept():
    lines = [json.dumps({"r": 0.0, "c": 0.0, "done": False}) for _ in range(3)]
    source = io.StringIO("\n".join(lines) + "\n")
    episodes = adapt_foreign_log(source, {"reward": "r", "cost": "c", "terminated": "done"})
    assert len(episodes) == 1
    assert episodes[0][0].length == 3
