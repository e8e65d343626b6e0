"""Run the four baseline policies and compare their safety profiles.

greedy_through charges straight at the in-region optimum, boundary_walker
slides along the region's rim at zero cost, random wanders, and
cem_lagrangian plans with a cost penalty whose weight adapts to observed
episode costs.
"""

import io
import time

from safebench import EnvConfig, PolicySpec, cost_rate, group_rollouts, read_log, run_experiment
from safebench.metrics import compute_metric_report
from safebench.rollout_log import episodes_to_reward_cost

SPECS = {
    "greedy_through": PolicySpec(kind="greedy_through"),
    "boundary_walker": PolicySpec(kind="boundary_walker"),
    "random": PolicySpec(kind="random"),
    "cem_lagrangian": PolicySpec(
        kind="cem_lagrangian",
        parameters={"horizon": 6, "iterations": 3, "population": 24,
                    "elite_frac": 0.25, "lambda_init": 1.0, "lambda_lr": 0.05},
    ),
}

print("=== 2000 environment steps per policy on level 1 ===")
print(f"{'policy':<16} {'EMCC^0.1 parts 1/2/3':<24} {'rho_c':>7} {'J_R':>9} {'J_C':>7}")
for name, spec in SPECS.items():
    started = time.perf_counter()
    buf = io.StringIO()
    run_experiment(EnvConfig(level=1), spec, episodes_per_rollout=4,
                   total_steps=2000, seed=0, sink=buf)
    buf.seek(0)
    episodes = read_log(buf)
    report = compute_metric_report(
        group_rollouts(episodes),
        episodes_to_reward_cost(episodes),
        gamma=0.99,
        cost_limit=5.0,
    )
    emcc = "/".join(
        "absent" if report.emcc[(beta, 0.1)] is None else f"{report.emcc[(beta, 0.1)]:.2f}"
        for beta in (0.33, 0.66, 0.99)
    )
    print(f"{name:<16} {emcc:<24} {report.cost_rate:>7.3f} {report.avg_return:>9.2f} "
          f"{report.avg_cost_return:>7.2f}   ({time.perf_counter() - started:.1f} s)")

print()
print("greedy_through maxes out the consecutive-run metric; boundary_walker is")
print("exactly zero on every safety column; the planner sits between them and")
print("moves toward safety as its cost penalty grows.")
