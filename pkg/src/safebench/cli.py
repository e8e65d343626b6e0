"""Command-line front end.

Subcommands: ``run`` (collect logs), ``metrics`` (CSV safety report),
``heatmap`` (per-training-part visitation maps), ``curves`` (training curves),
``serve`` (wire-protocol environment server). Exit codes: 0 success, 1 runtime
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from .config import ConfigError, EnvConfig, load_run_document
from .env import episode_return
from .geometry import build_geometry
from .heatmap import grid_csv_rows, visit_grids_by_part
from .metrics import MetricReport, compute_metric_report, report_items
from .policies import PolicySpec
from .rollout_log import (
    LogError,
    episodes_to_reward_cost,
    group_rollouts,
    read_log,
)
from .runner import run_experiment
from .server import EnvServer, serve_stdio
from .svgplot import render_curves_svg, render_heatmap_svg

DEFAULT_OUT = "safebench_out"


class UsageError(Exception):
    """Bad invocation: wrong files or flags (exit status 2)."""


def _resolve_out(out: str | None) -> Path:
    return Path(out or os.environ.get("SAFEBENCH_LOG_DIR") or DEFAULT_OUT)


def _write_csv(path: Path, fieldnames, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def cmd_run(args) -> int:
    try:
        doc = load_run_document(args.config)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {exc.filename}") from exc
    policy = PolicySpec.from_dict(doc.policy)
    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)

    seeds = list(range(args.seeds))
    logs = []
    summaries = {}
    for seed in seeds:
        name = f"run_seed{seed}.jsonl"
        with open(out / name, "w", encoding="utf-8") as sink:
            summary = run_experiment(
                doc.env,
                policy,
                doc.experiment.episodes_per_rollout,
                doc.experiment.total_steps,
                seed,
                sink,
            )
        logs.append(name)
        summaries[str(seed)] = {
            "episodes": summary.episodes,
            "rollouts": summary.rollouts,
            "steps": summary.steps,
        }
        print(f"seed {seed}: {summary.steps} steps, {summary.rollouts} rollouts -> {name}")

    manifest = {
        "config": doc.env.to_dict(),
        "policy": policy.to_dict(),
        "experiment": doc.experiment.to_dict(),
        "seeds": seeds,
        "env_config_digest": doc.env.digest(),
        "logs": logs,
        "summaries": summaries,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"manifest -> {out / 'manifest.json'}")
    return 0


def _load_reports(paths, gamma, cost_limit, alphas) -> list[MetricReport]:
    reports = []
    for path in paths:
        episodes = read_log(path)
        if not episodes:
            raise LogError(f"{path}: log contains no episodes")
        reports.append(
            compute_metric_report(
                group_rollouts(episodes),
                episodes_to_reward_cost(episodes),
                gamma=gamma,
                cost_limit=cost_limit,
                emcc_alphas=alphas,
            )
        )
    return reports


def cmd_metrics(args) -> int:
    reports = _load_reports(args.logs, args.gamma, args.cost_limit, (args.alpha,))
    per_seed = [report_items(r) for r in reports]
    rows = []
    for idx, (metric, beta, alpha, _) in enumerate(per_seed[0]):
        values = [items[idx][3] for items in per_seed]
        present = [v for v in values if v is not None]
        if not present:
            value, std = "absent", ""
        else:
            mean = sum(present) / len(present)
            value = repr(mean)
            if len(per_seed) > 1:
                std = repr(math.sqrt(sum((v - mean) ** 2 for v in present) / len(present)))
            else:
                std = ""
        rows.append(
            {"metric": metric, "beta": beta, "alpha": alpha, "value": value, "std": std}
        )

    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.csv"
    _write_csv(report_path, ["metric", "beta", "alpha", "value", "std"], rows)
    width = max(len(r["metric"]) for r in rows)
    for row in rows:
        shown = row["value"] if row["value"] == "absent" else f"{float(row['value']):.6g}"
        extra = f"  (std {float(row['std']):.3g})" if row["std"] else ""
        print(f"{row['metric']:<{width}}  {shown}{extra}")
    print(f"report -> {report_path}")
    return 0


def _geometry_for_logs(args, paths):
    if getattr(args, "config", None):
        try:
            return build_geometry(load_run_document(args.config).env)
        except FileNotFoundError as exc:
            raise UsageError(f"config file not found: {exc.filename}") from exc
    digests = set()
    for path in paths:
        for header, _ in read_log(path):
            digests.add(header.env_config_digest)
            break
    manifest_path = Path(paths[0]).parent / "manifest.json"
    if manifest_path.exists():
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
        if manifest.get("env_config_digest") in digests and len(digests) == 1:
            return build_geometry(EnvConfig.from_dict(manifest["config"]))
    if args.level is not None:
        return build_geometry(EnvConfig(level=args.level))
    raise UsageError(
        "cannot resolve the environment geometry for these logs; pass --level "
        "(or --config) explicitly"
    )


def cmd_heatmap(args) -> int:
    geometry = _geometry_for_logs(args, args.logs)
    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)

    part_grids = None
    for path in args.logs:
        episodes = read_log(path)
        if not episodes:
            raise LogError(f"{path}: log contains no episodes")
        grids = visit_grids_by_part(episodes, geometry, resolution=args.resolution)
        if part_grids is None:
            part_grids = grids
        else:
            for acc, grid in zip(part_grids, grids):
                acc.counts += grid.counts

    part_names = ("0-33%", "33-66%", "66-99%")
    for part_no, grid in enumerate(part_grids, start=1):
        svg_path = out / f"heatmap_part{part_no}.svg"
        csv_path = out / f"heatmap_part{part_no}.csv"
        title = f"visitation, training part {part_no} ({part_names[part_no - 1]})"
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(render_heatmap_svg(grid, geometry, title=title))
        _write_csv(
            csv_path, ["cell_x", "cell_y", "x_center", "y_center", "count"],
            grid_csv_rows(grid),
        )
        print(f"part {part_no}: {grid.total()} visits -> {svg_path}")
    return 0


def _per_rollout_curves(path, gamma):
    episodes = read_log(path)
    if not episodes:
        raise LogError(f"{path}: log contains no episodes")
    digest = episodes[0][0].env_config_digest
    by_rollout: dict[int, list[tuple[float, float]]] = {}
    for header, steps in episodes:
        ret = episode_return([s.reward for s in steps], gamma)
        cost = sum(s.cost for s in steps)
        by_rollout.setdefault(header.rollout_id, []).append((ret, cost))
    returns, costs = [], []
    for rollout_id in sorted(by_rollout):
        pairs = by_rollout[rollout_id]
        returns.append(sum(p[0] for p in pairs) / len(pairs))
        costs.append(sum(p[1] for p in pairs) / len(pairs))
    return digest, returns, costs


def cmd_curves(args) -> int:
    digests = set()
    all_returns, all_costs = [], []
    for path in args.logs:
        digest, returns, costs = _per_rollout_curves(path, args.gamma)
        digests.add(digest)
        all_returns.append(returns)
        all_costs.append(costs)
    if len(digests) > 1:
        raise LogError(
            f"logs were produced under different configs (digests {sorted(digests)})"
        )
    n_rollouts = min(len(r) for r in all_returns)

    def stats(series_list):
        means, stds = [], []
        for i in range(n_rollouts):
            vals = [series[i] for series in series_list]
            mean = sum(vals) / len(vals)
            means.append(mean)
            stds.append(math.sqrt(sum((v - mean) ** 2 for v in vals) / len(vals)))
        return means, stds

    ret_mean, ret_std = stats(all_returns)
    cost_mean, cost_std = stats(all_costs)

    out = _resolve_out(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        {
            "rollout_id": i,
            "return_mean": repr(ret_mean[i]),
            "return_std": repr(ret_std[i]),
            "cost_return_mean": repr(cost_mean[i]),
            "cost_return_std": repr(cost_std[i]),
        }
        for i in range(n_rollouts)
    ]
    csv_path = out / "curves.csv"
    _write_csv(
        csv_path,
        ["rollout_id", "return_mean", "return_std", "cost_return_mean", "cost_return_std"],
        rows,
    )
    multi = len(args.logs) > 1
    svg = render_curves_svg(
        list(range(n_rollouts)),
        [
            ("return", ret_mean, ret_std if multi else None, "#1f77b4"),
            ("cost return", cost_mean, cost_std if multi else None, "#ff7f0e"),
        ],
        title=f"training curves ({len(args.logs)} seed{'s' if multi else ''})",
        cost_limit=args.cost_limit,
    )
    svg_path = out / "curves.svg"
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"{n_rollouts} rollouts -> {csv_path}, {svg_path}")
    return 0


def cmd_serve(args) -> int:
    default_config = None
    if args.config:
        try:
            default_config = load_run_document(args.config).env
        except FileNotFoundError as exc:
            raise UsageError(f"config file not found: {exc.filename}") from exc
    if args.stdio:
        serve_stdio(default_config)
        return 0
    server = EnvServer(host=args.host, port=args.port, default_config=default_config)
    print(f"safebench-server listening on {args.host}:{server.port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="safebench",
        description="Collect, score, and visualize safe-exploration benchmark runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a policy and write trajectory logs")
    p_run.add_argument("--config", required=True, help="JSON run configuration")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--seeds", type=int, default=1, help="number of seeds (0..N-1)")
    p_run.set_defaults(func=cmd_run)

    p_metrics = sub.add_parser("metrics", help="compute the safety metric report")
    p_metrics.add_argument("logs", nargs="+", help="trajectory log files")
    p_metrics.add_argument("--out", default=None)
    p_metrics.add_argument("--alpha", type=float, default=0.1, help="EMCC risk level")
    p_metrics.add_argument("--gamma", type=float, default=0.99, help="return discount")
    p_metrics.add_argument("--cost-limit", type=float, default=5.0)
    p_metrics.set_defaults(func=cmd_metrics)

    p_heatmap = sub.add_parser("heatmap", help="render per-part visitation heatmaps")
    p_heatmap.add_argument("logs", nargs="+")
    p_heatmap.add_argument("--out", default=None)
    p_heatmap.add_argument("--level", type=int, default=None, choices=(0, 1, 2, 3))
    p_heatmap.add_argument("--config", default=None, help="explicit env config file")
    p_heatmap.add_argument("--resolution", type=int, default=100)
    p_heatmap.set_defaults(func=cmd_heatmap)

    p_curves = sub.add_parser("curves", help="per-rollout return and cost curves")
    p_curves.add_argument("logs", nargs="+")
    p_curves.add_argument("--out", default=None)
    p_curves.add_argument("--gamma", type=float, default=0.99)
    p_curves.add_argument("--cost-limit", type=float, default=5.0)
    p_curves.set_defaults(func=cmd_curves)

    p_serve = sub.add_parser("serve", help="serve environments over a socket")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=7801, help="0 picks a free port")
    p_serve.add_argument("--config", default=None, help="default env config file")
    p_serve.add_argument("--stdio", action="store_true", help="serve over stdin/stdout")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, LogError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
