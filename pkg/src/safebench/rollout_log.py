"""Line-delimited JSON trajectory logs.

One episode is a header line followed by one line per step:

    {"type":"episode","episode_id":0,"rollout_id":0,"seed":17,"env_config_digest":"…","length":2}
    {"type":"step","t":0,"observation":[…],"action":[…],"reward":-0.7,"cost":0.0,"terminated":false,"truncated":false}
    {"type":"step","t":1, …}

Numbers carry full round-trip precision, so identical runs produce
byte-identical files and reading back reproduces values exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError
from .metrics import EpisodeCosts, RolloutGroup


class LogError(ValueError):
    """Malformed or invariant-violating trajectory log."""


@dataclass(frozen=True)
class EpisodeHeader:
    episode_id: int
    rollout_id: int
    seed: int
    env_config_digest: str
    length: int


@dataclass(frozen=True)
class StepRecord:
    t: int
    observation: tuple[float, ...]
    action: tuple[float, ...]
    reward: float
    cost: float
    terminated: bool
    truncated: bool


def validate_episode(header: EpisodeHeader, steps) -> None:
    steps = list(steps)
    if header.length != len(steps):
        raise LogError(
            f"episode {header.episode_id}: header says {header.length} steps, "
            f"got {len(steps)}"
        )
    if header.length < 1:
        raise LogError(f"episode {header.episode_id}: must contain at least one step")
    for i, step in enumerate(steps):
        if step.t != i:
            raise LogError(
                f"episode {header.episode_id}: step index {step.t} at position {i}"
            )
        if not (math.isfinite(step.reward) and math.isfinite(step.cost)):
            raise LogError(
                f"episode {header.episode_id}: non-finite reward/cost at step {i}"
            )
        if (step.terminated or step.truncated) and i != len(steps) - 1:
            raise LogError(
                f"episode {header.episode_id}: terminal flag before the final step"
            )


def _header_line(header: EpisodeHeader) -> str:
    return json.dumps(
        {
            "type": "episode",
            "episode_id": header.episode_id,
            "rollout_id": header.rollout_id,
            "seed": header.seed,
            "env_config_digest": header.env_config_digest,
            "length": header.length,
        },
        separators=(",", ":"),
    )


def _step_line(step: StepRecord) -> str:
    return json.dumps(
        {
            "type": "step",
            "t": step.t,
            "observation": list(step.observation),
            "action": list(step.action),
            "reward": step.reward,
            "cost": step.cost,
            "terminated": step.terminated,
            "truncated": step.truncated,
        },
        separators=(",", ":"),
    )


def write_episode(sink, header: EpisodeHeader, steps) -> None:
    """Append one validated episode to a file-like sink; nothing is written
    when validation fails."""
    steps = list(steps)
    validate_episode(header, steps)
    lines = [_header_line(header)]
    lines.extend(_step_line(s) for s in steps)
    sink.write("\n".join(lines) + "\n")
    if hasattr(sink, "flush"):
        sink.flush()


def _parse_header(obj: dict, line_no: int) -> EpisodeHeader:
    try:
        return EpisodeHeader(
            episode_id=int(obj["episode_id"]),
            rollout_id=int(obj["rollout_id"]),
            seed=int(obj["seed"]),
            env_config_digest=str(obj["env_config_digest"]),
            length=int(obj["length"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise LogError(f"line {line_no}: bad episode header ({exc})") from exc


def _parse_step(obj: dict, line_no: int) -> StepRecord:
    try:
        return StepRecord(
            t=int(obj["t"]),
            observation=tuple(float(v) for v in obj["observation"]),
            action=tuple(float(v) for v in obj["action"]),
            reward=float(obj["reward"]),
            cost=float(obj["cost"]),
            terminated=bool(obj["terminated"]),
            truncated=bool(obj["truncated"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise LogError(f"line {line_no}: bad step record ({exc})") from exc


def _iter_json_lines(source):
    """Yield (line_no, parsed object) from a path or file-like source."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from _iter_json_lines(fh)
        return
    for line_no, line in enumerate(source, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LogError(f"line {line_no}: not valid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise LogError(f"line {line_no}: expected a JSON object")
        yield line_no, obj


def read_log(source) -> list[tuple[EpisodeHeader, list[StepRecord]]]:
    """Read and validate a full log; raises LogError with the offending line."""
    episodes: list[tuple[EpisodeHeader, list[StepRecord]]] = []
    header: EpisodeHeader | None = None
    steps: list[StepRecord] = []
    for line_no, obj in _iter_json_lines(source):
        kind = obj.get("type")
        if kind == "episode":
            if header is not None:
                raise LogError(
                    f"line {line_no}: episode {header.episode_id} ended after "
                    f"{len(steps)} of {header.length} steps"
                )
            header = _parse_header(obj, line_no)
            steps = []
        elif kind == "step":
            if header is None:
                raise LogError(f"line {line_no}: step record outside any episode")
            steps.append(_parse_step(obj, line_no))
            if len(steps) == header.length:
                validate_episode(header, steps)
                episodes.append((header, steps))
                header, steps = None, []
        else:
            raise LogError(f"line {line_no}: unknown record type {kind!r}")
    if header is not None:
        raise LogError(
            f"episode {header.episode_id} is truncated: "
            f"{len(steps)} of {header.length} steps present"
        )
    return episodes


def group_rollouts(episodes) -> list[RolloutGroup]:
    """Rebuild RolloutGroups (with cumulative step indices) from episodes."""
    groups: list[RolloutGroup] = []
    current_id: int | None = None
    current: list[EpisodeCosts] = []
    cumulative = 0

    def close() -> None:
        if current_id is not None:
            groups.append(
                RolloutGroup(
                    rollout_id=current_id,
                    episodes=tuple(current),
                    cumulative_step_index=cumulative,
                )
            )

    for header, steps in episodes:
        if header.rollout_id != current_id:
            close()
            if groups and header.rollout_id <= groups[-1].rollout_id:
                raise LogError(
                    f"rollout ids must increase, got {header.rollout_id} after "
                    f"{groups[-1].rollout_id}"
                )
            current_id = header.rollout_id
            current = []
        cumulative += len(steps)
        current.append(EpisodeCosts(tuple(s.cost for s in steps)))
    close()
    return groups


def episodes_to_reward_cost(episodes):
    """Strip episodes down to ([rewards], [costs]) pairs for metric functions."""
    return [
        ([s.reward for s in steps], [s.cost for s in steps]) for _, steps in episodes
    ]


REQUIRED_FOREIGN_FIELDS = ("reward", "cost", "terminated")


def adapt_foreign_log(
    source, mapping: dict, episodes_per_rollout: int = 1
) -> list[tuple[EpisodeHeader, list[StepRecord]]]:
    """Normalize a log whose step records use foreign field names.

    ``mapping`` maps native names (reward, cost, terminated, and optionally
    truncated, observation, action) to the foreign keys. Lines carrying
    {"type": "episode"} headers are passed through unchanged; bare step
    streams are split on terminal flags and receive synthesized headers, with
    one rollout per ``episodes_per_rollout`` episodes.
    """
    for required in REQUIRED_FOREIGN_FIELDS:
        if required not in mapping:
            raise ConfigError(f"foreign-log mapping is missing {required!r}")
    if episodes_per_rollout < 1:
        raise ConfigError("episodes_per_rollout must be at least 1")

    episodes: list[tuple[EpisodeHeader, list[StepRecord]]] = []
    header: EpisodeHeader | None = None
    steps: list[StepRecord] = []
    synth_count = 0

    def vector(obj, key) -> tuple[float, ...]:
        foreign = mapping.get(key)
        if foreign is None or foreign not in obj:
            return ()
        return tuple(float(v) for v in obj[foreign])

    def close_synthetic() -> None:
        nonlocal synth_count, steps
        if not steps:
            return
        synthesized = EpisodeHeader(
            episode_id=synth_count,
            rollout_id=synth_count // episodes_per_rollout,
            seed=-1,
            env_config_digest="foreign",
            length=len(steps),
        )
        validate_episode(synthesized, steps)
        episodes.append((synthesized, steps))
        synth_count += 1
        steps = []

    for line_no, obj in _iter_json_lines(source):
        if obj.get("type") == "episode":
            if header is not None or (header is None and steps):
                raise LogError(f"line {line_no}: header inside an open episode")
            header = _parse_header(obj, line_no)
            continue
        try:
            reward = float(obj[mapping["reward"]])
            cost = float(obj[mapping["cost"]])
        except KeyError as exc:
            raise LogError(f"line {line_no}: missing foreign field {exc}") from exc
        terminated = bool(obj.get(mapping["terminated"], False))
        truncated = bool(obj.get(mapping.get("truncated", ""), False))
        steps.append(
            StepRecord(
                t=len(steps),
                observation=vector(obj, "observation"),
                action=vector(obj, "action"),
                reward=reward,
                cost=cost,
                terminated=terminated,
                truncated=truncated,
            )
        )
        if header is not None:
            if len(steps) == header.length:
                validate_episode(header, steps)
                episodes.append((header, steps))
                header, steps = None, []
        elif terminated or truncated:
            close_synthetic()
    if header is not None:
        raise LogError(
            f"episode {header.episode_id} is truncated: "
            f"{len(steps)} of {header.length} steps present"
        )
    close_synthetic()
    return episodes
