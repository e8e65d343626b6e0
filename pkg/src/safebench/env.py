"""The Circle2D environment: point-mass navigation around a circular cost region.

The agent starts in a rectangle to the right of the region and is rewarded by
(negative, normalized) distance to an optimum placed inside the region, so the
reward gradient points straight through the unsafe area. The feasible optimum
sits at the inner end of the corridor. Every step inside the cost region costs
1; at level 0 the region is solid and unsafe moves are reverted instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import EnvConfig
from .geometry import (
    Geometry,
    build_geometry,
    in_cost_region,
    segment_intersects_cost_region,
)

_RESAMPLE_LIMIT = 1000


@dataclass(frozen=True)
class StepResult:
    observation: np.ndarray  # position / arena_half_extent, in [-1, 1]^2
    reward: float
    cost: float
    terminated: bool
    truncated: bool
    position: tuple[float, float]


def reward_at(config: EnvConfig, geometry: Geometry, position) -> float:
    """Reward of standing at a position.

    Dense mode: minus the distance to the in-region optimum, divided by
    init_radius_multiplier * constraint_radius (so the far edge of the init
    region scores about -1). Sparse mode keeps that value only inside the
    corridor or a cutout and is 0 elsewhere.
    """
    x, y = float(position[0]), float(position[1])
    if config.sparse_reward:
        if not any(r.contains(x, y) for r in geometry.openings):
            return 0.0
    ox, oy = geometry.infeasible_optimum
    return -math.hypot(x - ox, y - oy) / geometry.reward_scale


def episode_return(rewards, discount: float) -> float:
    """Discounted sum of a reward sequence; 0 for an empty sequence."""
    if not 0 <= discount <= 1:
        raise ValueError("discount must lie in [0, 1]")
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * float(r)
        factor *= discount
    return total


class Circle2DEnv:
    """Stateful single-episode environment; not safe to share across threads."""

    def __init__(self, config: EnvConfig | None = None):
        self.config = config if config is not None else EnvConfig()
        self.geometry = build_geometry(self.config)
        self._rng = np.random.default_rng(self.config.seed)
        self._position: tuple[float, float] | None = None
        self._steps = 0
        self._done = True

    @property
    def position(self) -> tuple[float, float]:
        if self._position is None:
            raise RuntimeError("reset() has not been called")
        return self._position

    @property
    def steps_taken(self) -> int:
        return self._steps

    @property
    def episode_active(self) -> bool:
        return not self._done and self._position is not None

    def _observe(self) -> np.ndarray:
        x, y = self.position
        half = self.config.arena_half_extent
        return np.array([x / half, y / half], dtype=np.float64)

    def init_region(self) -> tuple[float, float, float, float]:
        """Init rectangle as (x_min, x_max, y_min, y_max)."""
        radius = self.config.constraint_radius
        x_min = 1.05 * radius
        x_max = self.config.init_radius_multiplier * radius
        y_half = self.config.init_region_size * radius / 2.0
        return (x_min, x_max, -y_half, y_half)

    def reset(self, seed: int | None = None, position=None) -> np.ndarray:
        """Start a new episode; identical seeds give identical start positions.

        ``position`` overrides the random draw (used by scripted evaluation).
        """
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        if position is not None:
            x, y = float(position[0]), float(position[1])
        else:
            x_min, x_max, y_min, y_max = self.init_region()
            for _ in range(_RESAMPLE_LIMIT):
                x = float(self._rng.uniform(x_min, x_max))
                y = float(self._rng.uniform(y_min, y_max))
                if self.config.allow_infeasible_init or not in_cost_region(
                    self.geometry, (x, y)
                ):
                    break
            else:
                raise RuntimeError("could not sample a feasible start position")
        self._position = (x, y)
        self._steps = 0
        self._done = False
        return self._observe()

    def step(self, action) -> StepResult:
        if self._position is None or self._done:
            raise RuntimeError("step() called on a finished episode; reset() first")
        ax = float(action[0])
        ay = float(action[1])
        if not (math.isfinite(ax) and math.isfinite(ay)):
            raise ValueError("action components must be finite")
        ax = min(max(ax, -1.0), 1.0)
        ay = min(max(ay, -1.0), 1.0)

        px, py = self._position
        step = self.config.step_size
        half = self.config.arena_half_extent
        nx = min(max(px + step * ax, -half), half)
        ny = min(max(py + step * ay, -half), half)

        if self.config.penetratable:
            cost = 1.0 if in_cost_region(self.geometry, (nx, ny)) else 0.0
            self._position = (nx, ny)
        else:
            # Solid region: an unsafe move is reverted in full and costs 1.
            if segment_intersects_cost_region(self.geometry, (px, py), (nx, ny)):
                cost = 1.0
            else:
                cost = 0.0
                self._position = (nx, ny)

        self._steps += 1
        reward = reward_at(self.config, self.geometry, self._position)
        terminated = bool(self.config.reset_on_cost and cost > 0)
        truncated = self._steps >= self.config.max_episode_steps
        self._done = terminated or truncated
        return StepResult(
            observation=self._observe(),
            reward=reward,
            cost=cost,
            terminated=terminated,
            truncated=truncated,
            position=self._position,
        )
