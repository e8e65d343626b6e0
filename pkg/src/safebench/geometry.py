"""Geometry of the Circle2D cost region.

The cost region is the open disk of radius ``constraint_radius`` minus a
corridor opening on the left and, at higher levels, minus additional cutouts.
All rectangles are axis-aligned and closed, so standing on a rectangle edge
counts as being inside the corridor/cutout (and therefore outside the cost
region); standing exactly on the disk boundary is likewise cost-free because
the disk test is a strict inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import ConfigError, EnvConfig

# Fraction of the radius the corridor stops short of the center, and the spans
# of the corridor and init region relative to the radius. The cutouts reach
# half a radius inward from the rim.
CORRIDOR_INNER_FRACTION = 0.2
CORRIDOR_OUTER_FRACTION = 1.2
INIT_INNER_FRACTION = 1.05
CUTOUT_DEPTH_FRACTION = 0.5


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def segment_overlap(
        self, ax: float, ay: float, bx: float, by: float
    ) -> tuple[float, float] | None:
        """Parameter interval [t0, t1] of a->b lying inside the rectangle.

        Standard slab clipping; returns None when the segment misses the
        rectangle entirely.
        """
        t_lo, t_hi = 0.0, 1.0
        for p, d, lo, hi in (
            (ax, bx - ax, self.x_min, self.x_max),
            (ay, by - ay, self.y_min, self.y_max),
        ):
            if d == 0.0:
                if p < lo or p > hi:
                    return None
                continue
            t0 = (lo - p) / d
            t1 = (hi - p) / d
            if t0 > t1:
                t0, t1 = t1, t0
            t_lo = max(t_lo, t0)
            t_hi = min(t_hi, t1)
            if t_lo > t_hi:
                return None
        return (t_lo, t_hi)


@dataclass(frozen=True)
class Geometry:
    disk_center: tuple[float, float]
    disk_radius: float
    infeasible_optimum: tuple[float, float]
    feasible_optimum: tuple[float, float]
    corridor: Rect
    cutouts: tuple[Rect, ...]
    arena_half_extent: float
    reward_scale: float  # distance divisor for the reward

    @property
    def openings(self) -> tuple[Rect, ...]:
        """Corridor plus cutouts: every rectangle carved out of the disk."""
        return (self.corridor,) + self.cutouts


def _diagonal_cutouts(radius: float, width: float) -> list[Rect]:
    """Axis-aligned square cutouts centered on the four diagonal directions.

    Each square has side equal to the corridor height and sits centered at
    three quarters of the radius from the origin, approximating a radial
    notch of depth half the radius.
    """
    cutouts = []
    center_dist = radius * (1.0 - CUTOUT_DEPTH_FRACTION / 2.0)
    half = width / 2.0
    for angle in (45.0, 135.0, 225.0, 315.0):
        cx = center_dist * math.cos(math.radians(angle))
        cy = center_dist * math.sin(math.radians(angle))
        cutouts.append(Rect(cx - half, cy - half, cx + half, cy + half))
    return cutouts


def _axis_cutouts(radius: float, width: float) -> list[Rect]:
    """Radial slot cutouts at the top and bottom of the disk."""
    half = width / 2.0
    inner = radius * CUTOUT_DEPTH_FRACTION
    return [
        Rect(-half, inner, half, radius),
        Rect(-half, -radius, half, -inner),
    ]


def build_geometry(config: EnvConfig) -> Geometry:
    config.validate()
    radius = config.constraint_radius
    height = config.corridor_height_factor * radius
    corridor = Rect(
        -CORRIDOR_OUTER_FRACTION * radius,
        -height / 2.0,
        -CORRIDOR_INNER_FRACTION * radius,
        height / 2.0,
    )
    if config.level in (0, 1):
        cutouts: list[Rect] = []
    elif config.level == 2:
        cutouts = _axis_cutouts(radius, height)
    elif config.level == 3:
        cutouts = _diagonal_cutouts(radius, height)
    else:
        raise ConfigError(f"unsupported level {config.level!r}")

    optimum = config.optima_perturbation
    # The closest point to the (possibly perturbed) optimum on the corridor
    # centerline; for the default perturbation this is the corridor's inner end.
    feasible_x = min(max(optimum[0], corridor.x_min), corridor.x_max)
    feasible = (feasible_x, 0.0)

    return Geometry(
        disk_center=(0.0, 0.0),
        disk_radius=radius,
        infeasible_optimum=optimum,
        feasible_optimum=feasible,
        corridor=corridor,
        cutouts=tuple(cutouts),
        arena_half_extent=config.arena_half_extent,
        reward_scale=config.init_radius_multiplier * radius,
    )


def in_cost_region(geometry: Geometry, position) -> bool:
    """True iff the point lies strictly inside the disk and in no opening."""
    x = float(position[0]) - geometry.disk_center[0]
    y = float(position[1]) - geometry.disk_center[1]
    if x * x + y * y >= geometry.disk_radius * geometry.disk_radius:
        return False
    for rect in geometry.openings:
        if rect.contains(x, y):
            return False
    return True


def _disk_interval(
    geometry: Geometry, ax: float, ay: float, bx: float, by: float
) -> tuple[float, float] | None:
    """Open parameter interval of a->b strictly inside the disk, or None."""
    dx, dy = bx - ax, by - ay
    a = dx * dx + dy * dy
    if a == 0.0:
        if ax * ax + ay * ay < geometry.disk_radius**2:
            return (0.0, 1.0)
        return None
    b = ax * dx + ay * dy
    c = ax * ax + ay * ay - geometry.disk_radius**2
    disc = b * b - a * c
    if disc <= 0.0:  # misses or merely touches the boundary
        return None
    root = math.sqrt(disc)
    t0 = (-b - root) / a
    t1 = (-b + root) / a
    t0 = max(t0, 0.0)
    t1 = min(t1, 1.0)
    if t0 >= t1:
        return None
    return (t0, t1)


def segment_intersects_cost_region(geometry: Geometry, start, end) -> bool:
    """Whether any point of the segment lies in the cost region.

    Exact up to floating-point: the in-disk parameter interval comes from the
    circle-line quadratic, each opening contributes a closed slab-clipped
    interval, and the segment is unsafe iff those intervals fail to cover the
    in-disk interval.
    """
    ax = float(start[0]) - geometry.disk_center[0]
    ay = float(start[1]) - geometry.disk_center[1]
    bx = float(end[0]) - geometry.disk_center[0]
    by = float(end[1]) - geometry.disk_center[1]
    inside = _disk_interval(geometry, ax, ay, bx, by)
    if inside is None:
        return False
    t0, t1 = inside
    covers = []
    for rect in geometry.openings:
        overlap = rect.segment_overlap(ax, ay, bx, by)
        if overlap is not None and overlap[1] > t0 and overlap[0] < t1:
            covers.append(overlap)
    covers.sort()
    cursor = t0
    for lo, hi in covers:
        if lo > cursor:  # an uncovered open gap inside the disk
            return True
        cursor = max(cursor, hi)
        if cursor >= t1:
            return False
    return cursor < t1
