import subprocess
import sys

import pytest


def run_cli(*args):
    """Drive the simulator through its public CLI only."""
    proc = subprocess.run(
        [sys.executable, "-m", "mcdfp.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def variant_dirs(tmp_path_factory):
    """Full-size scenario-1 runs (50 reps, seed 7) for all three variants —
    the same data the simulator's attempt-cutoff acceptance criterion uses."""
    root = tmp_path_factory.mktemp("runs")
    dirs = {}
    for variant in ("mcdfp", "cdfp", "dfp"):
        out = root / variant
        run_cli(
            "run",
            "--preset",
            "scenario1",
            "--variant",
            variant,
            "--alpha",
            "0.1",
            "--seed",
            "7",
            "--reps",
            "50",
            "--out",
            str(out),
        )
        dirs[variant] = out
    return dirs


@pytest.fixture(scope="session")
def sweep_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sweep") / "cells"
    run_cli(
        "sweep",
        "--preset",
        "scenario1",
        "--reps",
        "2",
        "--horizon",
        "25",
        "--seed",
        "3",
        "--out",
        str(root),
    )
    return root
