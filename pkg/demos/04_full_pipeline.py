"""End-to-end pipeline through the command-line interface.

Writes a run configuration, collects three seeds of logs, then produces the
metric report, the per-part visitation heatmaps, and the training curves in
demos_output/pipeline/.
"""

import json
from pathlib import Path

from safebench.cli import main

OUT = Path(__file__).resolve().parent / "demos_output" / "pipeline"
OUT.mkdir(parents=True, exist_ok=True)

config = OUT / "config.json"
config.write_text(
    json.dumps(
        {
            "level": 1,
            "policy": {"kind": "random"},
            "experiment": {"total_steps": 3000, "episodes_per_rollout": 5},
        },
        indent=2,
    )
)
print(f"config -> {config}\n")

print("$ safebench run --config config.json --seeds 3 --out runs/")
main(["run", "--config", str(config), "--seeds", "3", "--out", str(OUT / "runs")])

logs = [str(OUT / "runs" / f"run_seed{i}.jsonl") for i in range(3)]

print("\n$ safebench metrics runs/*.jsonl --out report/")
main(["metrics", *logs, "--out", str(OUT / "report")])

print("\n$ safebench heatmap runs/*.jsonl --out heatmaps/")
main(["heatmap", *logs, "--out", str(OUT / "heatmaps")])

print("\n$ safebench curves runs/*.jsonl --out curves/")
main(["curves", *logs, "--out", str(OUT / "curves")])

print(f"\nAll artifacts under {OUT}")
