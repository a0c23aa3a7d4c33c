"""Target assignment game: utilities, best responses, equilibrium predicates, oracles.

N robots each select one of N targets. A robot pays its private positive cost
for a target only when at least one other robot selects the same target, so
the zero-cost profiles are exactly the perfect matchings.
"""

from __future__ import annotations

import itertools
import math
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

ActionProfile = tuple[int, ...]

#: Absolute tolerance for treating two expected utilities as tied.
BEST_RESPONSE_TIE_TOL = 1e-12

#: Largest team size accepted by the exhaustive equilibrium enumeration (N^N profiles).
ENUMERATION_LIMIT = 8

#: Tolerance for simplex membership checks.
SIMPLEX_TOL = 1e-9


def norm_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between two vectors."""
    d = a - b
    return math.sqrt(float(d @ d))


def action_vector(index: int, n: int) -> np.ndarray:
    """Canonical basis vector for a target selection."""
    if not 0 <= index < n:
        raise IndexError(f"target index {index} out of range for {n} targets")
    e = np.zeros(n)
    e[index] = 1.0
    return e


def uniform_frequency(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def is_frequency(p: np.ndarray, tol: float = SIMPLEX_TOL) -> bool:
    """True iff p lies on the probability simplex within tolerance."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        return False
    return bool(np.all(p >= -tol) and np.all(p <= 1.0 + tol) and abs(p.sum() - 1.0) <= tol)


def cost_matrix(robot_starts: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Squared-Euclidean coverage costs, frozen at the initial positions.

    Raises ValueError if a robot starts exactly on a target: zero costs break
    the strict-positivity the equilibrium analysis relies on.
    """
    starts = np.asarray(robot_starts, dtype=float)
    locs = np.asarray(targets, dtype=float)
    diff = starts[:, None, :] - locs[None, :, :]
    d = np.einsum("ikx,ikx->ik", diff, diff)
    if np.any(d <= 0.0):
        raise ValueError("coverage costs must be strictly positive; a robot starts on a target")
    return d


def _validate_profile(profile: Sequence[int], n: int) -> None:
    if len(profile) != n:
        raise ValueError(f"profile length {len(profile)} != {n} robots")
    for a in profile:
        if not 0 <= a < n:
            raise IndexError(f"target index {a} out of range for {n} targets")


def utility(i: int, profile: Sequence[int], costs: np.ndarray) -> float:
    """Robot i's realized cost: its cost for the chosen target if some other robot
    chose it too, else 0."""
    n = costs.shape[0]
    _validate_profile(profile, n)
    if not 0 <= i < n:
        raise IndexError(f"robot id {i} out of range")
    k = profile[i]
    covered = any(profile[j] == k for j in range(n) if j != i)
    return float(costs[i, k]) if covered else 0.0


def expected_utility(
    i: int, candidate: int, estimates: Mapping[int, np.ndarray], costs: np.ndarray
) -> float:
    """Expected cost of a candidate target under independent estimates of the others.

    Closed form: cost * (1 - prod_j (1 - p_j[candidate])), the probability that
    at least one other robot picks the same target.
    """
    n = costs.shape[0]
    if not 0 <= candidate < n:
        raise IndexError(f"target index {candidate} out of range")
    p_nobody = 1.0
    for j, freq in estimates.items():
        if j == i:
            raise ValueError("estimates must not include the robot's own id")
        p_nobody *= 1.0 - float(freq[candidate])
    return float(costs[i, candidate]) * (1.0 - p_nobody)


def best_response_set(
    i: int,
    estimates: Mapping[int, np.ndarray],
    costs: np.ndarray,
    tie_tol: float = BEST_RESPONSE_TIE_TOL,
) -> list[int]:
    """All targets minimizing the expected cost, ties resolved within tie_tol."""
    n = costs.shape[0]
    if estimates:
        stacked = np.array([estimates[j] for j in sorted(estimates)])
        p_nobody = np.prod(1.0 - stacked, axis=0)
    else:
        p_nobody = np.ones(n)
    values = costs[i] * (1.0 - p_nobody)
    best = values.min()
    return [k for k in range(n) if values[k] <= best + tie_tol]


def potential_term(i: int, profile: Sequence[int]) -> int:
    """1 iff robot i shares its target with another robot, else 0."""
    k = profile[i]
    return int(any(profile[j] == k for j in range(len(profile)) if j != i))


def potential(profile: Sequence[int]) -> int:
    """Number of robots involved in a target collision."""
    return sum(potential_term(i, profile) for i in range(len(profile)))


def is_pure_ne(profile: Sequence[int], costs: np.ndarray) -> bool:
    """True iff no robot has a strictly cost-reducing unilateral deviation."""
    n = costs.shape[0]
    _validate_profile(profile, n)
    deviated = list(profile)
    for i in range(n):
        current = utility(i, profile, costs)
        for k in range(n):
            if k == profile[i]:
                continue
            deviated[i] = k
            better = utility(i, deviated, costs)
            if better < current:
                deviated[i] = profile[i]
                return False
        deviated[i] = profile[i]
    return True


def enumerate_pure_ne(costs: np.ndarray) -> list[ActionProfile]:
    """All pure Nash profiles by exhaustive N^N search, lexicographic order."""
    n = costs.shape[0]
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limited to N <= {ENUMERATION_LIMIT}, got N = {n}")
    return [
        profile
        for profile in itertools.product(range(n), repeat=n)
        if is_pure_ne(profile, costs)
    ]


def assignment_cost(profile: Sequence[int], costs: np.ndarray) -> float:
    """Total cost of an assignment, counting every robot's selected target."""
    return float(sum(costs[i, k] for i, k in enumerate(profile)))


def optimal_assignment(costs: np.ndarray) -> tuple[ActionProfile, float]:
    """Minimum-total-cost perfect matching and its cost."""
    _, cols = linear_sum_assignment(costs)
    profile = tuple(int(k) for k in cols)
    return profile, assignment_cost(profile, costs)
