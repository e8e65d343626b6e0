"""Baseline policies that generate qualitatively distinct exploration logs.

Four kinds:

- ``random``: uniform actions, the unstructured-exploration baseline.
- ``greedy_through``: walks straight at the in-region optimum, ignoring cost.
- ``boundary_walker``: heads for the feasible optimum but deflects along the
  cost-region boundary instead of entering it; incurs no cost by construction.
- ``cem_lagrangian``: a cross-entropy planner on the true dynamics whose
  objective trades return against a cost penalty weighted by a Lagrange
  multiplier adapted from observed episode costs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ConfigError, EnvConfig
from .env import Circle2DEnv, reward_at
from .geometry import Geometry, in_cost_region, segment_intersects_cost_region

POLICY_KINDS = ("random", "greedy_through", "boundary_walker", "cem_lagrangian")


def _inner_goal(geometry: Geometry) -> tuple[float, float]:
    """The feasible optimum nudged a hair into the corridor.

    The optimum itself lies exactly on the corridor's inner edge, so a policy
    stepping onto it can land an ulp outside the corridor and pick up a
    spurious cost; the margin is far below any reward resolution.
    """
    fx, fy = geometry.feasible_optimum
    margin = 1e-9 * geometry.disk_radius
    return (max(geometry.corridor.x_min, fx - margin), fy)

CEM_DEFAULTS = {
    "horizon": 10,
    "iterations": 4,
    "population": 32,
    "elite_frac": 0.25,
    "lambda_init": 0.0,
    "lambda_lr": 0.05,
    "cost_limit": 5.0,
}


@dataclass
class PolicySpec:
    kind: str = "random"
    parameters: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in POLICY_KINDS:
            raise ConfigError(
                f"unknown policy kind {self.kind!r}; expected one of {POLICY_KINDS}"
            )
        if self.kind == "cem_lagrangian":
            merged = dict(CEM_DEFAULTS)
            unknown = set(self.parameters) - set(CEM_DEFAULTS)
            if unknown:
                raise ConfigError(f"unknown cem_lagrangian parameters: {sorted(unknown)}")
            merged.update(self.parameters)
            self.parameters = merged
            if merged["cost_limit"] <= 0:
                raise ConfigError("cost_limit must be positive")
            if merged["horizon"] < 1 or merged["iterations"] < 1:
                raise ConfigError("horizon and iterations must be at least 1")
            if merged["population"] * merged["elite_frac"] < 1:
                raise ConfigError(
                    "population * elite_frac must be at least 1 (degenerate elite set)"
                )
        elif self.parameters:
            raise ConfigError(f"policy kind {self.kind!r} takes no parameters")

    @classmethod
    def from_dict(cls, doc: dict) -> "PolicySpec":
        doc = dict(doc)
        kind = doc.pop("kind", "random")
        params = doc.pop("parameters", {})
        if doc:
            raise ConfigError(f"unknown policy keys: {sorted(doc)}")
        return cls(kind=kind, parameters=params)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "parameters": dict(self.parameters)}


@dataclass(frozen=True)
class LagrangianState:
    """Dual variable for the cost constraint, projected to stay nonnegative."""

    lam: float = 0.0
    running_jc: float = 0.0


def update_lambda(
    state: LagrangianState, observed_jc: float, cost_limit: float, lr: float
) -> LagrangianState:
    """Dual ascent on the constraint gap: grow lambda while costs exceed the limit."""
    if lr <= 0:
        raise ValueError("lr must be positive")
    lam = max(0.0, state.lam + lr * (observed_jc - cost_limit))
    return LagrangianState(lam=lam, running_jc=float(observed_jc))


def simulate_plan(config: EnvConfig, geometry: Geometry, start, actions):
    """Roll an action sequence through the true dynamics from a given position.

    Returns (rewards, costs); both stop early if a cost triggers termination
    under reset_on_cost.
    """
    px, py = float(start[0]), float(start[1])
    step = config.step_size
    half = config.arena_half_extent
    rewards: list[float] = []
    costs: list[float] = []
    for action in actions:
        ax = min(max(float(action[0]), -1.0), 1.0)
        ay = min(max(float(action[1]), -1.0), 1.0)
        nx = min(max(px + step * ax, -half), half)
        ny = min(max(py + step * ay, -half), half)
        if config.penetratable:
            cost = 1.0 if in_cost_region(geometry, (nx, ny)) else 0.0
            px, py = nx, ny
        else:
            if segment_intersects_cost_region(geometry, (px, py), (nx, ny)):
                cost = 1.0
            else:
                cost = 0.0
                px, py = nx, ny
        rewards.append(reward_at(config, geometry, (px, py)))
        costs.append(cost)
        if config.reset_on_cost and cost > 0:
            break
    return rewards, costs


def cem_plan(
    position,
    geometry: Geometry,
    config: EnvConfig,
    horizon: int,
    iterations: int,
    population: int,
    elite_frac: float,
    lam: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Cross-entropy search over action sequences; returns the elite mean plan.

    The score of a candidate is the discounted return minus lam times its
    summed cost, evaluated on the exact dynamics.
    """
    if horizon < 1:
        raise ConfigError("horizon must be at least 1")
    n_elite = int(population * elite_frac)
    if n_elite < 1:
        raise ConfigError("population * elite_frac must be at least 1")

    mean = np.zeros((horizon, 2))
    std = np.ones((horizon, 2))
    gamma = config.discount
    for _ in range(iterations):
        noise = rng.standard_normal((population, horizon, 2))
        candidates = np.clip(mean + std * noise, -1.0, 1.0)
        scores = np.empty(population)
        for i in range(population):
            rewards, costs = simulate_plan(config, geometry, position, candidates[i])
            ret = 0.0
            factor = 1.0
            for r in rewards:
                ret += factor * r
                factor *= gamma
            scores[i] = ret - lam * sum(costs)
        order = np.argsort(scores)[::-1]
        elites = candidates[order[:n_elite]]
        mean = elites.mean(axis=0)
        std = elites.std(axis=0) + 1e-6
    return np.clip(mean, -1.0, 1.0)


class RandomPolicy:
    def __init__(self, rng: np.random.Generator):
        self._rng = rng

    def act(self, observation, geometry: Geometry) -> np.ndarray:
        del observation, geometry
        return self._rng.uniform(-1.0, 1.0, size=2)

    def update_after_rollout(self, observed_jc: float) -> None:
        del observed_jc


class GreedyThroughPolicy:
    """Moves straight toward the in-region optimum regardless of cost."""

    def __init__(self, config: EnvConfig):
        self._step = config.step_size

    def act(self, observation, geometry: Geometry) -> np.ndarray:
        pos = np.asarray(observation, dtype=float) * geometry.arena_half_extent
        v = np.asarray(geometry.infeasible_optimum) - pos
        dist = float(np.hypot(v[0], v[1]))
        if dist < 1e-12:
            return np.zeros(2)
        if dist >= self._step:
            return v / dist
        return v / self._step

    def update_after_rollout(self, observed_jc: float) -> None:
        del observed_jc


class BoundaryWalkerPolicy:
    """Heads for the feasible optimum, sliding along the cost-region boundary.

    A step is taken directly when its whole segment avoids the cost region;
    otherwise it is replaced by one of the two tangent directions (perpendicular
    to the radial direction), preferring the one that shrinks the distance to
    the goal and breaking exact ties counterclockwise. If neither tangent is
    safe the policy stands still, so it never incurs cost from a feasible state.
    """

    def __init__(self, config: EnvConfig):
        self._config = config

    def act(self, observation, geometry: Geometry) -> np.ndarray:
        step = self._config.step_size
        pos = np.asarray(observation, dtype=float) * geometry.arena_half_extent
        goal = np.asarray(_inner_goal(geometry))
        v = goal - pos
        dist = float(np.hypot(v[0], v[1]))
        if dist < 1e-12:
            return np.zeros(2)
        length = min(dist, step)
        direct = v / dist * length
        if not segment_intersects_cost_region(geometry, pos, pos + direct):
            return direct / step

        cx, cy = geometry.disk_center
        rx, ry = pos[0] - cx, pos[1] - cy
        radius = math.hypot(rx, ry)
        if radius < 1e-12:
            return np.zeros(2)
        ccw = np.array([-ry, rx]) / radius
        cw = -ccw
        options = []
        for tangent in (ccw, cw):
            disp = tangent * step
            if segment_intersects_cost_region(geometry, pos, pos + disp):
                continue
            # Directional derivative of the goal distance; lower is better.
            options.append((float(tangent @ (pos - goal)), disp))
        if not options:
            return np.zeros(2)
        # min() is stable, so an exact tie keeps the counterclockwise entry.
        _, best = min(options, key=lambda item: item[0])
        return best / step

    def update_after_rollout(self, observed_jc: float) -> None:
        del observed_jc


class CemLagrangianPolicy:
    """Model-predictive cross-entropy planning with an adaptive cost penalty."""

    def __init__(self, config: EnvConfig, params: dict, rng: np.random.Generator):
        self._config = config
        self._params = dict(params)
        self._rng = rng
        self.state = LagrangianState(lam=float(params["lambda_init"]))

    def act(self, observation, geometry: Geometry) -> np.ndarray:
        pos = np.asarray(observation, dtype=float) * geometry.arena_half_extent
        plan = cem_plan(
            pos,
            geometry,
            self._config,
            horizon=int(self._params["horizon"]),
            iterations=int(self._params["iterations"]),
            population=int(self._params["population"]),
            elite_frac=float(self._params["elite_frac"]),
            lam=self.state.lam,
            rng=self._rng,
        )
        return plan[0]

    def update_after_rollout(self, observed_jc: float) -> None:
        self.state = update_lambda(
            self.state,
            observed_jc,
            cost_limit=float(self._params["cost_limit"]),
            lr=float(self._params["lambda_lr"]),
        )


def make_policy(spec: PolicySpec, config: EnvConfig, rng: np.random.Generator):
    if spec.kind == "random":
        return RandomPolicy(rng)
    if spec.kind == "greedy_through":
        return GreedyThroughPolicy(config)
    if spec.kind == "boundary_walker":
        return BoundaryWalkerPolicy(config)
    if spec.kind == "cem_lagrangian":
        return CemLagrangianPolicy(config, spec.parameters, rng)
    raise ConfigError(f"unknown policy kind {spec.kind!r}")


def init_region_center(config: EnvConfig) -> tuple[float, float]:
    radius = config.constraint_radius
    x = (1.05 * radius + config.init_radius_multiplier * radius) / 2.0
    return (x, 0.0)


def boundary_route(config: EnvConfig, geometry: Geometry, start) -> list[tuple[float, float]]:
    """Waypoints of a zero-cost route: tangent to a safety circle, along it
    counterclockwise to the corridor mouth, then in to the feasible optimum.

    The safety circle radius is chosen so straight chords between consecutive
    waypoints never dip inside the cost disk.
    """
    radius = geometry.disk_radius
    step = config.step_size
    safe_radius = math.hypot(radius, step / 2.0) * (1.0 + 1e-9)
    sx, sy = float(start[0]), float(start[1])
    start_dist = math.hypot(sx, sy)
    if start_dist <= safe_radius:
        raise ValueError("route requires a start outside the safety circle")

    start_angle = math.atan2(sy, sx)
    tangent_offset = math.acos(safe_radius / start_dist)
    tangent_angle = start_angle + tangent_offset

    entry_y = geometry.corridor.y_max / 2.0
    entry_x = -math.sqrt(safe_radius**2 - entry_y**2)
    entry_angle = math.atan2(entry_y, entry_x)

    arc = (entry_angle - tangent_angle) % (2.0 * math.pi)
    max_chord_angle = 2.0 * math.asin(step / (2.0 * safe_radius))
    n_chords = max(1, math.ceil(arc / max_chord_angle))

    waypoints = []
    for k in range(n_chords + 1):
        angle = tangent_angle + arc * k / n_chords
        waypoints.append((safe_radius * math.cos(angle), safe_radius * math.sin(angle)))
    waypoints.append(_inner_goal(geometry))
    return waypoints


def run_boundary_route_episode(config: EnvConfig, start=None):
    """Drive one full episode along the boundary route; returns (rewards, costs).

    Remaining steps after reaching the feasible optimum hold position there.
    """
    env = Circle2DEnv(config)
    if start is None:
        start = init_region_center(config)
    env.reset(seed=0, position=start)
    waypoints = boundary_route(config, env.geometry, start)
    step = config.step_size
    rewards: list[float] = []
    costs: list[float] = []
    index = 0
    while True:
        pos = np.asarray(env.position)
        while index < len(waypoints):
            target = np.asarray(waypoints[index])
            gap = float(np.hypot(*(target - pos)))
            if gap > 1e-9:
                break
            index += 1
        if index >= len(waypoints):
            action = np.zeros(2)
        else:
            to_target = np.asarray(waypoints[index]) - pos
            gap = float(np.hypot(*to_target))
            action = to_target / max(gap, step)
        result = env.step(action)
        rewards.append(result.reward)
        costs.append(result.cost)
        if result.terminated or result.truncated:
            return rewards, costs
