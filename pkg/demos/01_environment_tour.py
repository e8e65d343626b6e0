"""Tour of the Circle2D environment family.

Walks through the four difficulty levels, shows how the cost region is put
together, and demonstrates the level-0 "solid wall" behavior versus the
penetrable levels. Writes one geometry sketch per level to demos_output/.
"""

from pathlib import Path

from safebench import Circle2DEnv, EnvConfig, build_geometry, in_cost_region
from safebench.heatmap import arena_grid
from safebench.svgplot import render_heatmap_svg

OUT = Path(__file__).resolve().parent / "demos_output"
OUT.mkdir(exist_ok=True)

print("=== Circle2D geometry, level by level ===")
for level in range(4):
    geom = build_geometry(EnvConfig(level=level))
    print(f"\nlevel {level}:")
    print(f"  cost disk: radius {geom.disk_radius} around {geom.disk_center}")
    print(f"  corridor:  x in [{geom.corridor.x_min}, {geom.corridor.x_max}], "
          f"height {geom.corridor.y_max - geom.corridor.y_min}")
    print(f"  cutouts:   {len(geom.cutouts)}")
    print(f"  optima:    infeasible {geom.infeasible_optimum} (inside the region), "
          f"feasible {geom.feasible_optimum} (corridor end)")
    sketch = OUT / f"geometry_level{level}.svg"
    sketch.write_text(
        render_heatmap_svg(arena_grid(geom, resolution=10), geom,
                           title=f"Circle2D level {level}")
    )
    print(f"  sketch ->  {sketch}")

print("\n=== Movement semantics ===")
print("Levels 1-3: the region is penetrable, each step inside costs 1.")
env = Circle2DEnv(EnvConfig(level=1, step_size=0.5))
env.reset(seed=0, position=(10.2, 0.0))
result = env.step((-1.0, 0.0))
print(f"  level 1: step from (10.2, 0) toward the center -> "
      f"position {result.position}, cost {result.cost}")

print("Level 0: the region is solid; an unsafe move is reverted and still costs 1.")
env = Circle2DEnv(EnvConfig(level=0, step_size=0.5))
env.reset(seed=0, position=(10.2, 0.0))
result = env.step((-1.0, 0.0))
print(f"  level 0: same step -> position {result.position}, cost {result.cost}")

print("\n=== Reward shape ===")
cfg = EnvConfig(level=1)
geom = build_geometry(cfg)
from safebench import reward_at

for point in [(15.0, 0.0), (10.0, 0.0), geom.feasible_optimum, geom.infeasible_optimum]:
    tag = "in cost region" if in_cost_region(geom, point) else "feasible"
    print(f"  reward at {point}: {reward_at(cfg, geom, point):+.4f}  ({tag})")
print("The reward gradient points straight at the infeasible optimum, so greedy")
print("reward-following walks directly into the cost region.")
