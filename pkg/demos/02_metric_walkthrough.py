"""The consecutive-cost-step metric, computed by hand on two trajectories.

Two episodes with the same number of unsafe steps can represent very
different exploration behavior: eight violations in a row versus the same
eight spread over short dips. Episodic cost sums and cost rate cannot tell
them apart; the maximum-consecutive-cost-step statistic can.
"""

from safebench import (
    EpisodeCosts,
    RolloutGroup,
    cost_rate,
    emcc_beta_alpha,
    max_consecutive_cost_steps,
    mcc_of_rollout,
    partition_by_beta,
)

prolonged = [0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]
occasional = [0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0]

print("=== Two 25-step cost sequences with equal totals ===")
print(f"prolonged:  {prolonged}   total cost {sum(prolonged)}")
print(f"occasional: {occasional}   total cost {sum(occasional)}")
print(f"longest unsafe run: prolonged {max_consecutive_cost_steps(prolonged)}, "
      f"occasional {max_consecutive_cost_steps(occasional)}")

print("\n=== Normalization by episode length ===")
for costs in (prolonged, occasional):
    rollout = RolloutGroup(0, (EpisodeCosts(tuple(map(float, costs))),), len(costs))
    print(f"  run {max_consecutive_cost_steps(costs)} / length {len(costs)} "
          f"-> MCC {mcc_of_rollout(rollout).value:.3f}")
print("An episode cut short right after a violation keeps a high MCC: 5 unsafe")
print("steps in a 10-step episode score 0.5, the same 5 in 50 steps only 0.1.")

print("\n=== A training stream, split into three parts ===")
# nine rollouts: wild early exploration, cautious late behavior
nested = (
    [[1, 1, 1, 1, 0, 0], [1, 1, 1, 1, 1, 0]],   # early: long runs
    [[0, 1, 1, 1, 0, 0]],
    [[1, 1, 0, 0, 0, 0]],
    [[0, 1, 0, 1, 0, 0]],                        # middle: shorter runs
    [[0, 0, 1, 1, 0, 0]],
    [[0, 1, 0, 0, 1, 0]],
    [[0, 0, 0, 1, 0, 0]],                        # late: rare single dips
    [[0, 0, 0, 0, 0, 0]],
    [[0, 0, 0, 0, 1, 0]],
)
stream = []
cumulative = 0
for rollout_id, episodes in enumerate(nested):
    cumulative += sum(len(c) for c in episodes)
    stream.append(
        RolloutGroup(
            rollout_id,
            tuple(EpisodeCosts(tuple(map(float, c))) for c in episodes),
            cumulative,
        )
    )

parts = partition_by_beta(stream)
for index, part in enumerate(parts):
    print(f"  part {index + 1}: rollouts {[r.rollout_id for r in part]}, "
          f"MCC values {[round(mcc_of_rollout(r).value, 3) for r in part]}")

print("\n=== EMCC per part, tail-focused by the risk level ===")
for alpha in (1.0, 0.5, 0.1):
    row = [emcc_beta_alpha(stream, part, alpha) for part in (1, 2, 3)]
    cells = ", ".join("absent" if v is None else f"{v:.3f}" for v in row)
    print(f"  alpha {alpha:>4}: {cells}")
print(f"cost rate over the whole stream: {cost_rate(stream):.3f}")
print("Smaller risk levels keep only the worst rollouts of each part, so the")
print("early-training part stands out while the aggregate cost rate blurs it.")
