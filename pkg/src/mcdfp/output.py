"""Result persistence: metrics.csv, trajectories.csv, summary.json.

Floats are written with repr(), the shortest representation that parses back
to the identical value, so emitted files are byte-stable across runs and
round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .engine import BatchResult, RunResult, ScenarioConfig

METRICS_HEADER = [
    "replication",
    "t",
    "variant",
    "ne_distance",
    "est_error",
    "attempts",
    "successes",
    "attempts_per_link",
    "success_ratio",
    "converged",
    "actions",
    "positions",
]

TRAJECTORIES_HEADER = ["replication", "t", "robot", "x", "y"]


def fmt(x: float) -> str:
    return repr(float(x))


def write_metrics_csv(path: str | Path, config: ScenarioConfig, results: list[RunResult]) -> None:
    """One row per (replication, timestep)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_HEADER)
        for rep, result in enumerate(results):
            for frame in result.frames:
                writer.writerow(
                    [
                        rep,
                        frame.t,
                        config.variant.value,
                        fmt(frame.ne_distance),
                        fmt(frame.est_error),
                        frame.attempts,
                        frame.successes,
                        fmt(frame.attempts_per_link),
                        fmt(frame.success_ratio),
                        "true" if frame.converged else "false",
                        ";".join(str(a) for a in frame.actions),
                        ";".join(f"{fmt(x)}:{fmt(y)}" for x, y in frame.positions),
                    ]
                )


def read_metrics_csv(path: str | Path) -> list[dict]:
    """Parse an emitted metrics.csv back into typed records."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != METRICS_HEADER:
            raise ValueError(f"unexpected metrics header in {path}: {header}")
        rows = []
        for raw in reader:
            rec = dict(zip(METRICS_HEADER, raw))
            rec["replication"] = int(rec["replication"])
            rec["t"] = int(rec["t"])
            for key in ("ne_distance", "est_error", "attempts_per_link", "success_ratio"):
                rec[key] = float(rec[key])
            for key in ("attempts", "successes"):
                rec[key] = int(rec[key])
            rec["converged"] = rec["converged"] == "true"
            rec["actions"] = tuple(int(a) for a in rec["actions"].split(";"))
            rec["positions"] = tuple(
                tuple(float(c) for c in pair.split(":")) for pair in rec["positions"].split(";")
            )
            rows.append(rec)
        return rows


def write_trajectories_csv(
    path: str | Path, config: ScenarioConfig, results: list[RunResult]
) -> None:
    """Per-robot positions over time, including the t=0 starting points."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORIES_HEADER)
        for rep, result in enumerate(results):
            for robot, (x, y) in enumerate(config.robot_starts):
                writer.writerow([rep, 0, robot, fmt(x), fmt(y)])
            for frame in result.frames:
                for robot, (x, y) in enumerate(frame.positions):
                    writer.writerow([rep, frame.t, robot, fmt(x), fmt(y)])


def write_summary_json(path: str | Path, config: ScenarioConfig, batch: BatchResult) -> None:
    doc = batch.summary.to_dict()
    # Scenario geometry rides along so downstream tools (figures) are
    # self-contained on the run directory.
    doc["robot_starts"] = config.robot_starts.tolist()
    doc["targets"] = config.targets.tolist()
    doc["alpha"] = config.mobility.alpha
    doc["coverage_tol"] = config.mobility.coverage_tol
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_run_outputs(out_dir: str | Path, config: ScenarioConfig, batch: BatchResult) -> None:
    """Emit the standard triple into a run directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(out / "metrics.csv", config, batch.results)
    write_trajectories_csv(out / "trajectories.csv", config, batch.results)
    write_summary_json(out / "summary.json", config, batch)
