from __future__ import annotations

import math

import numpy as np
import pytest

from emcc_oracle import (
    oracle_cost_rate,
    oracle_cvar,
    oracle_emcc,
    oracle_max_run,
    oracle_var,
)
from safebench.metrics import (
    EpisodeCosts,
    RolloutGroup,
    cost_rate,
    cvar_alpha,
    emcc_beta_alpha,
    emcc_label,
    evaluation_summary,
    max_consecutive_cost_steps,
    mcc_of_rollout,
    partition_by_beta,
    var_alpha,
)


def make_stream(episode_costs_per_rollout):
    """Build RolloutGroups from plain nested lists of per-step costs."""
    stream = []
    cumulative = 0
    for rollout_id, episodes in enumerate(episode_costs_per_rollout):
        cumulative += sum(len(costs) for costs in episodes)
        stream.append(
            RolloutGroup(
                rollout_id=rollout_id,
                episodes=tuple(EpisodeCosts(tuple(costs)) for costs in episodes),
                cumulative_step_index=cumulative,
            )
        )
    return stream


def random_stream(rng, max_rollouts=20, max_episodes=6, max_steps=30):
    n_rollouts = int(rng.integers(1, max_rollouts + 1))
    nested = []
    for _ in range(n_rollouts):
        n_episodes = int(rng.integers(1, max_episodes + 1))
        episodes = []
        for _ in range(n_episodes):
            n_steps = int(rng.integers(1, max_steps + 1))
            episodes.append((rng.random(n_steps) < rng.uniform(0.05, 0.9)).astype(float).tolist())
        nested.append(episodes)
    return nested


# --- run scanning -----------------------------------------------------------


def test_max_run_examples():
    assert max_consecutive_cost_steps([0, 1, 1, 1, 0, 1, 1]) == 3
    assert max_consecutive_cost_steps([0.0] * 17) == 0
    assert max_consecutive_cost_steps([]) == 0
    assert max_consecutive_cost_steps([1, 1, 1]) == 3


def test_max_run_figure_sequences():
    # two 25-step trajectories whose longest unsafe chains are 8 and 3
    long_chain = [0] * 10 + [1] * 8 + [0] * 7
    short_chain = [0, 1, 1, 0, 1, 0, 1, 1, 3, 0, 1, 0, 1, 1, 0, 1, 0, 1, 0, 0, 1, 0, 1, 0, 0]
    assert len(long_chain) == len(short_chain) == 25
    assert max_consecutive_cost_steps(long_chain) == 8
    assert max_consecutive_cost_steps(short_chain) == 3


def test_max_run_matches_oracle_on_random_inputs():
    rng = np.random.default_rng(0)
    for _ in range(300):
        costs = (rng.random(int(rng.integers(0, 60))) < 0.4).astype(float)
        assert max_consecutive_cost_steps(costs) == oracle_max_run(costs)


def test_positive_real_costs_count_as_cost_steps():
    assert max_consecutive_cost_steps([0.0, 0.25, 0.5, 0.0, 2.0]) == 2


# --- MCC ---------------------------------------------------------------------


def test_mcc_examples():
    stream = make_stream([[[1, 1, 1] + [0] * 7, [1] * 5 + [0] * 45]])
    assert mcc_of_rollout(stream[0]).value == pytest.approx(0.3)

    fully_unsafe = make_stream([[[1] * 12]])
    assert mcc_of_rollout(fully_unsafe[0]).value == 1.0

    two = make_stream([[[0, 1, 1, 0], [1, 0, 0, 1]]])
    assert mcc_of_rollout(two[0]).value == 0.5


def test_mcc_bounds_and_zero_one_characterization():
    rng = np.random.default_rng(1)
    for _ in range(200):
        nested = random_stream(rng, max_rollouts=1)
        sample = mcc_of_rollout(make_stream(nested)[0])
        assert 0.0 <= sample.value <= 1.0
        any_cost = any(any(c > 0 for c in ep) for ep in nested[0])
        assert (sample.value == 0.0) == (not any_cost)
        fully = any(all(c > 0 for c in ep) for ep in nested[0])
        assert (sample.value == 1.0) == fully


def test_mcc_invariant_under_time_stretching():
    rng = np.random.default_rng(2)
    for _ in range(100):
        costs = (rng.random(int(rng.integers(1, 40))) < 0.3).astype(float)
        stretched = np.repeat(costs, 2)
        original = max_consecutive_cost_steps(costs) / len(costs)
        doubled = max_consecutive_cost_steps(stretched) / len(stretched)
        assert original == doubled


def test_empty_rollout_rejected():
    with pytest.raises(ValueError):
        RolloutGroup(rollout_id=0, episodes=(), cumulative_step_index=1)
    with pytest.raises(ValueError):
        EpisodeCosts(())


# --- partitioning ------------------------------------------------------------


def test_partition_uniform_rollouts():
    stream = make_stream([[[0] * 10] for _ in range(30)])
    parts = partition_by_beta(stream)
    assert [len(p) for p in parts] == [10, 10, 10]
    assert [r.rollout_id for r in parts[0]] == list(range(10))


def test_partition_single_rollout_goes_first():
    stream = make_stream([[[0, 1, 0]]])
    parts = partition_by_beta(stream)
    assert [len(p) for p in parts] == [1, 0, 0]


def test_partition_matches_fraction_oracle_on_mixed_lengths():
    rng = np.random.default_rng(3)
    from emcc_oracle import oracle_partition

    for _ in range(100):
        nested = random_stream(rng)
        stream = make_stream(nested)
        oracle_input = [
            (nested[i], stream[i].cumulative_step_index) for i in range(len(stream))
        ]
        got = [[r.rollout_id for r in part] for part in partition_by_beta(stream)]
        expected_sizes = [len(p) for p in oracle_partition(oracle_input)]
        assert [len(p) for p in got] == expected_sizes


def test_partition_isolation_is_bitwise():
    rng = np.random.default_rng(4)
    for _ in range(50):
        nested = random_stream(rng, max_rollouts=12)
        stream = make_stream(nested)
        parts = partition_by_beta(stream)
        if not parts[0] or (not parts[1] and not parts[2]):
            continue
        before = emcc_beta_alpha(stream, 1, 0.5)
        # corrupt every later-part rollout's costs without touching lengths
        later_ids = {r.rollout_id for r in parts[1] + parts[2]}
        mutated_nested = [
            [[1.0 - c if c in (0.0, 1.0) else c for c in ep] for ep in episodes]
            if i in later_ids
            else episodes
            for i, episodes in enumerate(nested)
        ]
        after = emcc_beta_alpha(make_stream(mutated_nested), 1, 0.5)
        assert before == after


# --- VaR / CVaR --------------------------------------------------------------


def test_var_examples():
    assert var_alpha(range(1, 11), 0.2) == 8
    assert var_alpha([3.5], 0.7) == 3.5
    assert var_alpha([5, 5, 5, 5], 0.5) == 5


def test_cvar_examples():
    assert cvar_alpha(range(1, 11), 0.2) == pytest.approx(9.0)
    assert cvar_alpha(range(1, 11), 0.999) == pytest.approx(5.5)  # whole-sample mean
    assert cvar_alpha([2.5] * 7, 0.3) == 2.5


def test_var_cvar_match_oracle_on_random_multisets():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 40))
        values = np.round(rng.normal(size=n) * rng.integers(1, 4), 2).tolist()
        alpha = float(rng.uniform(0.01, 0.99))
        assert var_alpha(values, alpha) == oracle_var(values, alpha)
        assert cvar_alpha(values, alpha) == oracle_cvar(values, alpha)


def test_cvar_dominates_mean():
    rng = np.random.default_rng(6)
    for _ in range(200):
        values = rng.normal(size=int(rng.integers(1, 30))).tolist()
        alpha = float(rng.uniform(0.05, 0.95))
        assert cvar_alpha(values, alpha) >= sum(values) / len(values) - 1e-12
    # equality for constants
    assert cvar_alpha([4.0] * 9, 0.4) == 4.0
    # strict dominance when values are distinct and the threshold clears the minimum
    values = list(range(10))
    assert cvar_alpha(values, 0.5) > sum(values) / len(values)


def test_var_cvar_reject_bad_inputs():
    with pytest.raises(ValueError):
        var_alpha([], 0.5)
    with pytest.raises(ValueError):
        cvar_alpha([], 0.5)
    with pytest.raises(ValueError):
        var_alpha([1.0], 0.0)
    with pytest.raises(ValueError):
        var_alpha([1.0], 1.0)


# --- EMCC --------------------------------------------------------------------


def test_emcc_top_share_example():
    # ten rollouts, one per tenth of the training, MCC values 0.1 .. 1.0
    nested = []
    for d in range(1, 11):
        nested.append([[1.0] * d + [0.0] * (10 - d)])
    stream = make_stream(nested)
    values = [mcc_of_rollout(r).value for r in stream]
    assert values == pytest.approx([d / 10 for d in range(1, 11)])
    # all ten fall in one part when the stream is a single rollout group list
    one_part = emcc_beta_alpha(stream, 1, 0.2, parts=1)
    assert one_part == pytest.approx((0.9 + 1.0) / 2)
    assert emcc_beta_alpha(stream, 1, 1.0, parts=1) == pytest.approx(0.55)


def test_emcc_single_rollout_any_alpha():
    stream = make_stream([[[1, 1, 0, 0]]])
    for alpha in (0.05, 0.3, 1.0):
        assert emcc_beta_alpha(stream, 1, alpha) == pytest.approx(0.5)


def test_emcc_absent_parts_are_none():
    stream = make_stream([[[1, 0]]])
    assert emcc_beta_alpha(stream, 2, 0.5) is None
    assert emcc_beta_alpha(stream, 3, 0.5) is None


def test_emcc_monotone_in_alpha():
    rng = np.random.default_rng(7)
    for _ in range(50):
        stream = make_stream(random_stream(rng))
        alphas = sorted(rng.uniform(0.01, 1.0, size=4))
        for part in (1, 2, 3):
            values = [emcc_beta_alpha(stream, part, a) for a in alphas]
            present = [v for v in values if v is not None]
            assert all(a >= b - 1e-12 for a, b in zip(present, present[1:]))


def test_emcc_equals_bruteforce_oracle():
    rng = np.random.default_rng(8)
    for _ in range(60):
        nested = random_stream(rng)
        stream = make_stream(nested)
        oracle_input = [
            (nested[i], stream[i].cumulative_step_index) for i in range(len(stream))
        ]
        for part in (1, 2, 3):
            for alpha in (0.1, 0.5, 1.0):
                assert emcc_beta_alpha(stream, part, alpha) == oracle_emcc(
                    oracle_input, part, alpha
                )


def test_emcc_label_format():
    assert emcc_label(0.1, 0.33) == "EMCC^{0.1}_{0.33}"


# --- cost rate and summaries -------------------------------------------------


def test_cost_rate_examples():
    ten_costs = make_stream([[[1.0] * 10 + [0.0] * 40, [0.0] * 50]])
    assert cost_rate(ten_costs) == pytest.approx(0.1)
    assert cost_rate(make_stream([[[0.0] * 10]])) == 0.0


def test_cost_rate_matches_flat_sum_oracle():
    rng = np.random.default_rng(9)
    for _ in range(50):
        nested = random_stream(rng)
        stream = make_stream(nested)
        oracle_input = [
            (nested[i], stream[i].cumulative_step_index) for i in range(len(stream))
        ]
        assert cost_rate(stream) == pytest.approx(oracle_cost_rate(oracle_input))


def test_evaluation_summary_basic():
    summary = evaluation_summary(
        [([1.0, 1.0], [0.0, 1.0])], gamma=1.0, cost_limit=5.0, alphas=(0.5,)
    )
    assert summary.avg_return == 2.0
    assert summary.avg_cost_return == 1.0
    assert summary.feasible


def test_evaluation_summary_cvar_of_cost_sums():
    episodes = [([0.0], [float(k)]) for k in range(10)]
    summary = evaluation_summary(episodes, gamma=0.99, cost_limit=5.0, alphas=(0.5,))
    # inclusive-tail CVaR at 0.5 of {0..9}: threshold 4, mean of {4..9}
    assert summary.cvar_cost_return[0.5] == pytest.approx(oracle_cvar(range(10), 0.5))
    assert summary.cvar_cost_return[0.5] == pytest.approx(6.5)


def test_evaluation_summary_all_safe():
    episodes = [([0.5, 0.5], [0.0, 0.0]) for _ in range(4)]
    summary = evaluation_summary(episodes, gamma=1.0, cost_limit=0.1, alphas=(0.5,))
    assert summary.avg_cost_return == 0.0
    assert summary.cvar_cost_return[0.5] == 0.0
    assert summary.feasible
