"""Experiment loop: collect rollouts under a baseline policy into a log stream."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EnvConfig
from .env import Circle2DEnv
from .policies import PolicySpec, make_policy
from .rollout_log import EpisodeHeader, StepRecord, write_episode


def episode_seed(experiment_seed: int, episode_id: int) -> int:
    """Stable per-episode reset seed derived from the experiment seed."""
    seq = np.random.SeedSequence(entropy=[int(experiment_seed), int(episode_id)])
    return int(seq.generate_state(1)[0])


@dataclass(frozen=True)
class RunSummary:
    episodes: int
    rollouts: int
    steps: int
    env_config_digest: str


def run_experiment(
    env_config: EnvConfig,
    policy_spec: PolicySpec,
    episodes_per_rollout: int,
    total_steps: int,
    seed: int,
    sink,
) -> RunSummary:
    """Alternate collect-rollout / update-policy until total_steps are logged.

    Episodes always run to their natural end, so the final rollout may hold
    fewer episodes. Identical inputs produce byte-identical log streams.
    """
    if total_steps < 1:
        raise ValueError("total_steps must be at least 1")
    if episodes_per_rollout < 1:
        raise ValueError("episodes_per_rollout must be at least 1")

    env = Circle2DEnv(env_config)
    policy = make_policy(
        policy_spec, env_config, np.random.default_rng([int(seed), 0x5AFE])
    )
    digest = env_config.digest()

    episode_id = 0
    rollout_id = 0
    steps_logged = 0
    while steps_logged < total_steps:
        rollout_cost_sums = []
        for _ in range(episodes_per_rollout):
            ep_seed = episode_seed(seed, episode_id)
            obs = env.reset(seed=ep_seed)
            records: list[StepRecord] = []
            while True:
                action = np.asarray(policy.act(obs, env.geometry), dtype=float)
                result = env.step(action)
                records.append(
                    StepRecord(
                        t=len(records),
                        observation=tuple(float(v) for v in result.observation),
                        action=(float(action[0]), float(action[1])),
                        reward=float(result.reward),
                        cost=float(result.cost),
                        terminated=result.terminated,
                        truncated=result.truncated,
                    )
                )
                obs = result.observation
                if result.terminated or result.truncated:
                    break
            header = EpisodeHeader(
                episode_id=episode_id,
                rollout_id=rollout_id,
                seed=ep_seed,
                env_config_digest=digest,
                length=len(records),
            )
            write_episode(sink, header, records)
            episode_id += 1
            steps_logged += len(records)
            rollout_cost_sums.append(sum(step.cost for step in records))
            if steps_logged >= total_steps:
                break
        policy.update_after_rollout(sum(rollout_cost_sums) / len(rollout_cost_sums))
        rollout_id += 1
    return RunSummary(
        episodes=episode_id,
        rollouts=rollout_id,
        steps=steps_logged,
        env_config_digest=digest,
    )
