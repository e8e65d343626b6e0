"""State-visitation grids over the arena, split by training part."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Geometry
from .metrics import partition_by_beta
from .rollout_log import group_rollouts


@dataclass
class HeatmapGrid:
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    resolution: int = 100
    counts: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.resolution < 1:
            raise ValueError("resolution must be at least 1")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("bounds must span a positive area")
        if self.counts is None:
            self.counts = np.zeros((self.resolution, self.resolution), dtype=np.int64)

    @property
    def cell_width(self) -> float:
        return (self.x_max - self.x_min) / self.resolution

    @property
    def cell_height(self) -> float:
        return (self.y_max - self.y_min) / self.resolution

    def cell_index(self, x: float, y: float) -> tuple[int, int] | None:
        """Cell of a position, clamped on the upper edges; None if out of bounds."""
        if not (self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max):
            return None
        ix = int((x - self.x_min) // self.cell_width)
        iy = int((y - self.y_min) // self.cell_height)
        return (min(ix, self.resolution - 1), min(iy, self.resolution - 1))

    def add(self, x: float, y: float) -> bool:
        idx = self.cell_index(x, y)
        if idx is None:
            return False
        self.counts[idx] += 1
        return True

    def total(self) -> int:
        return int(self.counts.sum())


def arena_grid(geometry: Geometry, resolution: int = 100) -> HeatmapGrid:
    half = geometry.arena_half_extent
    return HeatmapGrid(-half, -half, half, half, resolution)


def visit_grids_by_part(
    episodes, geometry: Geometry, resolution: int = 100, parts: int = 3
) -> list[HeatmapGrid]:
    """One visitation grid per training part.

    Positions are the logged post-step observations scaled back to arena
    coordinates; the part of an episode is the part of its rollout.
    """
    stream = group_rollouts(episodes)
    partition = partition_by_beta(stream, parts)
    part_of = {}
    for part_no, rollouts in enumerate(partition):
        for rollout in rollouts:
            part_of[rollout.rollout_id] = part_no
    grids = [arena_grid(geometry, resolution) for _ in range(parts)]
    half = geometry.arena_half_extent
    for header, steps in episodes:
        grid = grids[part_of[header.rollout_id]]
        for step in steps:
            grid.add(step.observation[0] * half, step.observation[1] * half)
    return grids


def grid_csv_rows(grid: HeatmapGrid) -> list[dict]:
    rows = []
    for ix in range(grid.resolution):
        for iy in range(grid.resolution):
            rows.append(
                {
                    "cell_x": ix,
                    "cell_y": iy,
                    "x_center": repr(grid.x_min + (ix + 0.5) * grid.cell_width),
                    "y_center": repr(grid.y_min + (iy + 0.5) * grid.cell_height),
                    "count": int(grid.counts[ix, iy]),
                }
            )
    return rows
