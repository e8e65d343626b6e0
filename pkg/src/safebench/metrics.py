"""Safety metrics over trajectory logs.

The centerpiece is EMCC, the expected maximum consecutive cost steps: for each
episode take the longest run of costly steps divided by the episode length,
for each rollout take the maximum over its episodes (the rollout's MCC), split
the training stream into parts by cumulative environment steps, keep only the
top share of MCC values selected by a risk level alpha, and average. Long
uninterrupted violations therefore score much worse than the same number of
costs spread out, which episodic cost sums and cost rate cannot distinguish.

Also provided: cost rate (total cost over total steps), mean discounted return
and mean episodic cost, and VaR/CVaR of the episodic cost-sum distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Display labels of the three training parts, in stream order.
BETA_LABELS = (0.33, 0.66, 0.99)


@dataclass(frozen=True)
class EpisodeCosts:
    """Per-step costs of one episode; the episode length is len(costs)."""

    costs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "costs", tuple(float(c) for c in self.costs))
        if len(self.costs) == 0:
            raise ValueError("an episode must contain at least one step")

    @property
    def length(self) -> int:
        return len(self.costs)


@dataclass(frozen=True)
class RolloutGroup:
    """Episodes collected under one policy snapshot.

    cumulative_step_index is the number of environment steps completed at the
    end of this rollout, counted from the start of training.
    """

    rollout_id: int
    episodes: tuple[EpisodeCosts, ...]
    cumulative_step_index: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "episodes", tuple(self.episodes))
        if not self.episodes:
            raise ValueError("a rollout must contain at least one episode")


@dataclass(frozen=True)
class MccSample:
    value: float
    cumulative_step_index: int


def max_consecutive_cost_steps(costs) -> int:
    """Length of the longest run of steps with cost > 0."""
    arr = np.asarray(list(costs), dtype=float)
    if arr.size == 0:
        return 0
    mask = arr > 0
    if not mask.any():
        return 0
    padded = np.concatenate(([False], mask, [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return int((edges[1::2] - edges[0::2]).max())


def mcc_of_rollout(rollout: RolloutGroup) -> MccSample:
    """Worst normalized cost run over the rollout's episodes, in [0, 1]."""
    value = max(
        max_consecutive_cost_steps(ep.costs) / ep.length for ep in rollout.episodes
    )
    return MccSample(value=value, cumulative_step_index=rollout.cumulative_step_index)


def _part_index(start_step: int, total_steps: int, parts: int) -> int:
    # Integer cross-multiplication keeps the boundary exact: a rollout whose
    # start fraction reaches i/parts belongs to part i+1.
    return min(parts - 1, start_step * parts // total_steps)


def partition_by_beta(stream, parts: int = 3) -> list[list[RolloutGroup]]:
    """Split a training stream into equal parts by cumulative environment steps.

    A rollout belongs to the part its starting step falls into, so data
    collected later can never move or change an earlier part.
    """
    stream = list(stream)
    if not stream:
        raise ValueError("stream must contain at least one rollout")
    if parts < 1:
        raise ValueError("parts must be at least 1")
    total = stream[-1].cumulative_step_index
    if total <= 0:
        raise ValueError("cumulative_step_index of the final rollout must be positive")
    result: list[list[RolloutGroup]] = [[] for _ in range(parts)]
    previous_end = 0
    for rollout in stream:
        end = rollout.cumulative_step_index
        if end < previous_end:
            raise ValueError("cumulative_step_index must be nondecreasing")
        result[_part_index(previous_end, total, parts)].append(rollout)
        previous_end = end
    return result


def var_alpha(values, alpha: float) -> float:
    """Empirical value-at-risk: the smallest value whose CDF reaches 1 - alpha."""
    vals = sorted(float(v) for v in values)
    if not vals:
        raise ValueError("values must be nonempty")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    n = len(vals)
    target = 1.0 - alpha
    for i, v in enumerate(vals):
        if i + 1 < n and vals[i + 1] == v:
            continue  # CDF only steps at the last copy of a tied value
        if (i + 1) / n >= target:
            return v
    return vals[-1]


def cvar_alpha(values, alpha: float) -> float:
    """Mean of the inclusive upper tail {v : v >= VaR_alpha}."""
    vals = sorted(float(v) for v in values)
    if not vals:
        raise ValueError("values must be nonempty")
    threshold = var_alpha(vals, alpha)
    tail = [v for v in vals if v >= threshold]
    return sum(tail) / len(tail)


def emcc_beta_alpha(stream, beta_part: int, alpha: float, parts: int = 3) -> float | None:
    """EMCC of one training part at risk level alpha.

    Steps: partition the stream, compute each rollout's MCC, keep the
    max(1, ceil(alpha * n)) largest values, and average them. alpha = 1 keeps
    everything and reduces to the plain part average. Returns None when the
    requested part holds no rollouts (absent, never zero).
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if not 1 <= beta_part <= parts:
        raise ValueError(f"beta_part must lie in 1..{parts}")
    part = partition_by_beta(stream, parts)[beta_part - 1]
    if not part:
        return None
    values = sorted((mcc_of_rollout(r).value for r in part), reverse=True)
    keep = min(len(values), max(1, math.ceil(alpha * len(values))))
    return sum(values[:keep]) / keep


def cost_rate(stream) -> float:
    """Total cost divided by total environment steps across the stream."""
    total_cost = 0.0
    total_steps = 0
    for rollout in stream:
        for ep in rollout.episodes:
            total_cost += sum(ep.costs)
            total_steps += ep.length
    if total_steps == 0:
        raise ValueError("stream contains no steps")
    return total_cost / total_steps


@dataclass(frozen=True)
class EvaluationSummary:
    """Episode-level aggregates: returns, costs, and cost-sum tail risk."""

    avg_return: float
    avg_cost_return: float
    cvar_cost_return: dict[float, float]
    episode_length_mean: float
    cost_limit: float
    feasible: bool


def evaluation_summary(episodes, gamma: float, cost_limit: float, alphas) -> EvaluationSummary:
    """Summarize (rewards, costs) pairs per episode.

    Returns are discounted by gamma; episodic cost sums are undiscounted, and
    their CVaR is reported for each requested risk level.
    """
    episodes = list(episodes)
    if not episodes:
        raise ValueError("episodes must be nonempty")
    returns = []
    cost_sums = []
    lengths = []
    for rewards, costs in episodes:
        ret = 0.0
        factor = 1.0
        for r in rewards:
            ret += factor * float(r)
            factor *= gamma
        returns.append(ret)
        cost_sums.append(float(sum(costs)))
        lengths.append(len(costs))
    avg_return = sum(returns) / len(returns)
    avg_cost = sum(cost_sums) / len(cost_sums)
    cvar = {float(a): cvar_alpha(cost_sums, a) for a in alphas}
    return EvaluationSummary(
        avg_return=avg_return,
        avg_cost_return=avg_cost,
        cvar_cost_return=cvar,
        episode_length_mean=sum(lengths) / len(lengths),
        cost_limit=float(cost_limit),
        feasible=avg_cost <= cost_limit,
    )


@dataclass
class MetricReport:
    """Full per-run report: EMCC per part, cost rate, and episode aggregates."""

    emcc: dict[tuple[float, float], float | None]  # keyed by (beta label, alpha)
    cost_rate: float
    avg_return: float
    avg_cost_return: float
    cvar_cost_return: dict[float, float]
    episode_length_mean: float
    cost_limit: float
    feasible: bool
    beta_labels: tuple[float, ...] = BETA_LABELS


def emcc_label(alpha: float, beta: float) -> str:
    return f"EMCC^{{{alpha:g}}}_{{{beta:g}}}"


def compute_metric_report(
    stream,
    episodes,
    gamma: float,
    cost_limit: float,
    emcc_alphas=(0.1,),
    cvar_alphas=(0.5,),
    parts: int = 3,
) -> MetricReport:
    stream = list(stream)
    summary = evaluation_summary(episodes, gamma, cost_limit, cvar_alphas)
    emcc: dict[tuple[float, float], float | None] = {}
    labels = BETA_LABELS if parts == 3 else tuple((i + 1) / parts for i in range(parts))
    for part in range(1, parts + 1):
        for alpha in emcc_alphas:
            emcc[(labels[part - 1], float(alpha))] = emcc_beta_alpha(
                stream, part, alpha, parts
            )
    return MetricReport(
        emcc=emcc,
        cost_rate=cost_rate(stream),
        avg_return=summary.avg_return,
        avg_cost_return=summary.avg_cost_return,
        cvar_cost_return=summary.cvar_cost_return,
        episode_length_mean=summary.episode_length_mean,
        cost_limit=summary.cost_limit,
        feasible=summary.feasible,
        beta_labels=labels,
    )


def report_items(report: MetricReport) -> list[tuple[str, str, str, float | None]]:
    """Report cells in canonical order as (metric, beta, alpha, value) tuples.

    Values are floats, or None for an absent (empty-partition) EMCC cell.
    """
    items: list[tuple[str, str, str, float | None]] = []
    for (beta, alpha), value in sorted(report.emcc.items()):
        items.append((emcc_label(alpha, beta), f"{beta:g}", f"{alpha:g}", value))
    items.append(("rho_c", "", "", report.cost_rate))
    items.append(("J_R", "", "", report.avg_return))
    items.append(("J_C", "", "", report.avg_cost_return))
    for alpha, value in sorted(report.cvar_cost_return.items()):
        items.append((f"CVaR_{{{alpha:g}}}", "", f"{alpha:g}", value))
    items.append(("episode_length_mean", "", "", report.episode_length_mean))
    items.append(("feasible", "", "", 1.0 if report.feasible else 0.0))
    return items


def report_rows(report: MetricReport) -> list[dict]:
    """Flatten a report to CSV-ready rows with metric/beta/alpha/value columns."""
    return [
        {
            "metric": metric,
            "beta": beta,
            "alpha": alpha,
            "value": "absent" if value is None else repr(value),
        }
        for metric, beta, alpha, value in report_items(report)
    ]
