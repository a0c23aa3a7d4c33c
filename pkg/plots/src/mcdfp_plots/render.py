"""Figure rendering from simulator run directories.

Inputs are the emitted files only: `metrics.csv` (exact header contract) and
`summary.json` (geometry and aggregate rates). Every image gets a JSON sidecar
(`<image>.json`) holding the exact plotted series, so figure content is
testable without image diffing. Inputs are never modified.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

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

KINDS = ("convergence", "est_error", "success_ratio", "attempts", "trajectories", "sweep")
FORMATS = ("png", "svg")

SERIES_COLUMN = {
    "convergence": "ne_distance",
    "est_error": "est_error",
    "success_ratio": "success_ratio",
    "attempts": "attempts_per_link",
}

AXIS_LABEL = {
    "convergence": "distance of empirical frequencies to the locked profile",
    "est_error": "total estimation error",
    "success_ratio": "communication success ratio",
    "attempts": "mean communication attempts per link",
}


class PlotInputError(Exception):
    """Missing or malformed input; the message names the offending path."""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    inputs: tuple[Path, ...]
    out: Path
    image_format: str = "png"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.image_format not in FORMATS:
            raise ValueError(f"unknown image format {self.image_format!r}")
        if not self.inputs:
            raise ValueError("at least one input directory is required")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "out", Path(self.out))


@dataclass
class RunData:
    """Parsed content of one run directory."""

    directory: Path
    variant: str
    horizon: int
    replications: int
    frames: list[dict] = field(repr=False, default_factory=list)
    summary: dict = field(repr=False, default_factory=dict)


def _parse_float(value: str, path: Path) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise PlotInputError(f"malformed numeric field in {path}: {value!r}") from exc


def load_run(directory: str | Path) -> RunData:
    directory = Path(directory)
    metrics = directory / "metrics.csv"
    if not metrics.is_file():
        raise PlotInputError(f"missing metrics file: {metrics}")
    rows = []
    with open(metrics, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != METRICS_HEADER:
            raise PlotInputError(f"unexpected metrics header in {metrics}")
        for raw in reader:
            if len(raw) != len(METRICS_HEADER):
                raise PlotInputError(f"short row in {metrics}: {raw!r}")
            rec = dict(zip(METRICS_HEADER, raw))
            rec["replication"] = int(rec["replication"])
            rec["t"] = int(rec["t"])
            for key in ("ne_distance", "est_error", "attempts_per_link", "success_ratio"):
                rec[key] = _parse_float(rec[key], metrics)
            rec["converged"] = rec["converged"] == "true"
            rec["positions"] = [
                tuple(_parse_float(c, metrics) for c in pair.split(":"))
                for pair in rec["positions"].split(";")
            ]
            rows.append(rec)
    if not rows:
        raise PlotInputError(f"no data rows in {metrics}")
    summary = {}
    summary_path = directory / "summary.json"
    if summary_path.is_file():
        try:
            summary = json.loads(summary_path.read_text())
        except json.JSONDecodeError as exc:
            raise PlotInputError(f"malformed summary file: {summary_path}") from exc
    horizon = max(r["t"] for r in rows)
    replications = max(r["replication"] for r in rows) + 1
    return RunData(
        directory=directory,
        variant=rows[0]["variant"],
        horizon=horizon,
        replications=replications,
        frames=rows,
        summary=summary,
    )


def mean_curve(run: RunData, column: str) -> list[float]:
    """Per-timestep mean across replications.

    The locked-profile distance only exists for converged replications, so it
    averages over those; every other column averages over all replications.
    """
    by_t: dict[int, list[float]] = {}
    if column == "ne_distance":
        converged = {r["replication"] for r in run.frames if r["t"] == run.horizon and r["converged"]}
        rows = [r for r in run.frames if r["replication"] in converged]
    else:
        rows = run.frames
    for r in rows:
        by_t.setdefault(r["t"], []).append(r[column])
    return [
        float(np.mean(by_t[t])) if t in by_t else math.nan
        for t in range(1, run.horizon + 1)
    ]


def robot_paths(run: RunData, replication: int = 0) -> list[list[tuple[float, float]]]:
    """Per-robot position sequences for one replication, starts included."""
    frames = sorted(
        (r for r in run.frames if r["replication"] == replication), key=lambda r: r["t"]
    )
    if not frames:
        raise PlotInputError(f"replication {replication} not present in {run.directory}")
    n = len(frames[0]["positions"])
    starts = run.summary.get("robot_starts")
    paths = [[] for _ in range(n)]
    if starts is not None:
        for i in range(n):
            paths[i].append((float(starts[i][0]), float(starts[i][1])))
    for rec in frames:
        for i in range(n):
            paths[i].append(rec["positions"][i])
    return paths


def _jsonable(value):
    """Strict-JSON form: non-finite floats become null."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_sidecar(out: Path, payload: dict) -> Path:
    sidecar = out.with_name(out.name + ".json")
    with open(sidecar, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    return sidecar


def _render_mean_curves(spec: PlotSpec, runs: list[RunData]) -> dict:
    column = SERIES_COLUMN[spec.kind]
    series = {run.variant: mean_curve(run, column) for run in runs}
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    for run in runs:
        ax.plot(range(1, run.horizon + 1), series[run.variant], label=run.variant)
    ax.set_xlabel("timestep")
    ax.set_ylabel(AXIS_LABEL[spec.kind])
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.out, format=spec.image_format)
    plt.close(fig)
    return {
        "kind": spec.kind,
        "t": list(range(1, runs[0].horizon + 1)),
        "series": series,
        "replications": {run.variant: run.replications for run in runs},
    }


def _render_trajectories(spec: PlotSpec, runs: list[RunData]) -> dict:
    fig, axes = plt.subplots(1, len(runs), figsize=(5.0 * len(runs), 4.5), squeeze=False)
    payload_runs = {}
    for ax, run in zip(axes[0], runs):
        paths = robot_paths(run)
        for i, path in enumerate(paths):
            xs, ys = zip(*path)
            ax.plot(xs, ys, linewidth=1.0)
            ax.plot(xs[0], ys[0], marker="o", color="black", markersize=4)
        targets = run.summary.get("targets")
        if targets:
            tx = [p[0] for p in targets]
            ty = [p[1] for p in targets]
            ax.plot(tx, ty, linestyle="", marker="x", color="red", markersize=9)
        ax.set_title(run.variant)
        ax.set_aspect("equal", adjustable="datalim")
        ax.grid(True, alpha=0.3)
        payload_runs[run.variant] = {
            "paths": [[list(p) for p in path] for path in paths],
            "targets": run.summary.get("targets"),
            "replication": 0,
        }
    fig.tight_layout()
    fig.savefig(spec.out, format=spec.image_format)
    plt.close(fig)
    return {"kind": spec.kind, "runs": payload_runs}


def _render_sweep(spec: PlotSpec, runs: list[RunData]) -> dict:
    cols = 2
    rows = math.ceil(len(runs) / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(5.0 * cols, 3.5 * rows), squeeze=False)
    cells = {}
    for idx, run in enumerate(runs):
        ax = axes[idx // cols][idx % cols]
        curve = mean_curve(run, "attempts_per_link")
        ax.plot(range(1, run.horizon + 1), curve)
        conv = run.summary.get("convergence_rate")
        cell_meta = {}
        cell_path = run.directory / "cell.json"
        if cell_path.is_file():
            cell_meta = json.loads(cell_path.read_text())
        title = ", ".join(f"{k}={v:g}" for k, v in sorted(cell_meta.items())) or run.directory.name
        ax.set_title(title, fontsize=9)
        if conv is not None:
            ax.annotate(
                f"{100 * conv:.0f}%",
                xy=(0.82, 0.82),
                xycoords="axes fraction",
                color="red",
                fontsize=12,
            )
        ax.set_ylim(0.0, 1.05)
        ax.grid(True, alpha=0.3)
        cells[run.directory.name] = {
            "attempts_per_link": curve,
            "convergence_rate": conv,
            "cell": cell_meta,
        }
    for idx in range(len(runs), rows * cols):
        axes[idx // cols][idx % cols].axis("off")
    fig.tight_layout()
    fig.savefig(spec.out, format=spec.image_format)
    plt.close(fig)
    return {"kind": spec.kind, "cells": cells}


def render(spec: PlotSpec) -> tuple[Path, Path]:
    """Render one figure plus its data sidecar; returns (image, sidecar)."""
    runs = [load_run(p) for p in spec.inputs]
    horizons = {run.horizon for run in runs}
    if spec.kind in SERIES_COLUMN and len(horizons) != 1:
        raise PlotInputError(
            f"inputs cover different timestep ranges {sorted(horizons)}: "
            + ", ".join(str(r.directory) for r in runs)
        )
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    if spec.kind in SERIES_COLUMN:
        payload = _render_mean_curves(spec, runs)
    elif spec.kind == "trajectories":
        payload = _render_trajectories(spec, runs)
    else:
        payload = _render_sweep(spec, runs)
    sidecar = _write_sidecar(spec.out, payload)
    return spec.out, sidecar
