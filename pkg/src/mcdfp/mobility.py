"""Position dynamics: estimated final locations of peers, communication-aware
heading selection, single-step integration, and coverage predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class MobilityParams:
    """Motion constants. With `clamp_step` (the default) robots advance toward
    the heading point at constant speed `alpha` per step, arriving exactly when
    closer than that; without it, `alpha` is the per-step fraction of the
    remaining vector, so motion decelerates near the goal."""

    alpha: float = 0.1
    dt: float = 1.0
    coverage_tol: float = 0.1
    clamp_step: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.coverage_tol <= 0.0:
            raise ValueError(f"coverage_tol must be positive, got {self.coverage_tol}")


def estimate_final_position(freq: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Frequency-weighted centroid of target locations: where a robot believed
    to select targets with these probabilities would end up."""
    return np.asarray(freq, dtype=float) @ np.asarray(targets, dtype=float)


def select_direction(
    own_target_loc: np.ndarray,
    neighbor_estimates: Mapping[int, np.ndarray],
    v_weights: Mapping[int, float],
) -> np.ndarray:
    """Heading point trading off the selected target against peers one needs
    to reach: the weighted average of the target and the estimated peer
    positions (unique minimizer of the quadratic compromise objective)."""
    num = np.asarray(own_target_loc, dtype=float).copy()
    total = 1.0
    for j, v in v_weights.items():
        if v < 0.0:
            raise ValueError(f"negative mobility weight {v} for robot {j}")
        if v == 0.0:
            continue
        num += v * neighbor_estimates[j]
        total += v
    return num / total


def step_position(position: np.ndarray, x_dir: np.ndarray, params: MobilityParams) -> np.ndarray:
    """Advance one step toward the heading point.

    Literal mode moves an `alpha` fraction of the remaining vector (the step
    time cancels out of the position update). Clamp mode caps the step length
    at `alpha`, arriving exactly when closer than that.
    """
    position = np.asarray(position, dtype=float)
    delta = np.asarray(x_dir, dtype=float) - position
    if params.clamp_step:
        dist = math.sqrt(float(delta @ delta))
        if dist <= params.alpha:
            return position + delta
        return position + (params.alpha / dist) * delta
    return position + params.alpha * delta


def velocity(position: np.ndarray, x_dir: np.ndarray, params: MobilityParams) -> np.ndarray:
    """Commanded velocity for the step (only reporting depends on dt)."""
    return params.alpha * (np.asarray(x_dir, float) - np.asarray(position, float)) / params.dt


def coverage_achieved(
    final_positions: Sequence[np.ndarray],
    final_actions: Sequence[int],
    targets: np.ndarray,
    tol: float,
) -> bool:
    """True iff the selections form a perfect matching and every robot sits
    within `tol` of its selected target."""
    n = len(targets)
    if sorted(final_actions) != list(range(n)):
        return False
    for pos, k in zip(final_positions, final_actions):
        d = np.asarray(pos, dtype=float) - targets[k]
        if math.sqrt(float(d @ d)) > tol:
            return False
    return True
