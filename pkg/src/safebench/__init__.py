"""Safe-exploration benchmarking toolkit.

Circle2D benchmark environments, consecutive-cost-step (EMCC) safety metrics,
trajectory logging, baseline policies, and analysis/serving front ends.
"""

from .config import ConfigError, EnvConfig, ExperimentConfig, parse_run_document
from .env import Circle2DEnv, StepResult, episode_return, reward_at
from .geometry import (
    Geometry,
    Rect,
    build_geometry,
    in_cost_region,
    segment_intersects_cost_region,
)
from .metrics import (
    EpisodeCosts,
    EvaluationSummary,
    MccSample,
    MetricReport,
    RolloutGroup,
    compute_metric_report,
    cost_rate,
    cvar_alpha,
    emcc_beta_alpha,
    evaluation_summary,
    max_consecutive_cost_steps,
    mcc_of_rollout,
    partition_by_beta,
    var_alpha,
)
from .policies import (
    LagrangianState,
    PolicySpec,
    cem_plan,
    make_policy,
    update_lambda,
)
from .rollout_log import (
    EpisodeHeader,
    LogError,
    StepRecord,
    adapt_foreign_log,
    group_rollouts,
    read_log,
    write_episode,
)
from .runner import run_experiment
from .server import EnvServer, Session, serve_stdio

__all__ = [
    "Circle2DEnv",
    "ConfigError",
    "EnvConfig",
    "EnvServer",
    "EpisodeCosts",
    "EpisodeHeader",
    "EvaluationSummary",
    "ExperimentConfig",
    "Geometry",
    "LagrangianState",
    "LogError",
    "MccSample",
    "MetricReport",
    "PolicySpec",
    "Rect",
    "RolloutGroup",
    "Session",
    "StepRecord",
    "StepResult",
    "adapt_foreign_log",
    "build_geometry",
    "cem_plan",
    "compute_metric_report",
    "cost_rate",
    "cvar_alpha",
    "emcc_beta_alpha",
    "episode_return",
    "evaluation_summary",
    "group_rollouts",
    "in_cost_region",
    "make_policy",
    "max_consecutive_cost_steps",
    "mcc_of_rollout",
    "parse_run_document",
    "partition_by_beta",
    "read_log",
    "reward_at",
    "run_experiment",
    "segment_intersects_cost_region",
    "serve_stdio",
    "update_lambda",
    "var_alpha",
    "write_episode",
]
