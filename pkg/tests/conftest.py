import time

import pytest

from mcdfp import preset_config, run_batch


@pytest.fixture(scope="session")
def s1_batches():
    """Scenario 1 batches (alpha=0.1, seed 7, 50 reps) for all three variants,
    shared across engine and acceptance tests. Wall time is recorded for the
    runtime criterion."""
    out = {}
    t0 = time.perf_counter()
    for variant in ("mcdfp", "cdfp", "dfp"):
        cfg = preset_config("scenario1", variant=variant, alpha=0.1, seed=7, replications=50)
        out[variant] = run_batch(cfg)
    out["elapsed"] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def s2_batches():
    """Scenario 2 batches (alpha=0.025, seed 7, 50 reps)."""
    out = {}
    for variant in ("mcdfp", "dfp"):
        cfg = preset_config("scenario2", variant=variant, alpha=0.025, seed=7, replications=50)
        out[variant] = run_batch(cfg)
    return out
