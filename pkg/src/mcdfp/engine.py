"""Simulation engine: the per-step protocol for each algorithm variant,
seeded replication batches, convergence detection, and metric recording."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .agent import (
    AgentState,
    LearnParams,
    initial_state,
    select_action,
    update_own_frequency,
)
from .channel import CommParams, comm_weight, run_comm_round
from .game import (
    ActionProfile,
    action_vector,
    assignment_cost,
    cost_matrix,
    is_pure_ne,
    norm_diff,
    optimal_assignment,
)
from .mobility import (
    MobilityParams,
    coverage_achieved,
    estimate_final_position,
    select_direction,
    step_position,
)


class Variant(str, Enum):
    """Algorithm variants: full protocol, communication-only ablation, and the
    always-transmit fixed-rate baseline."""

    MCDFP = "mcdfp"
    CDFP = "cdfp"
    DFP = "dfp"


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a seeded batch needs: geometry, parameters, variant, horizon."""

    robot_starts: np.ndarray
    targets: np.ndarray
    learn: LearnParams = LearnParams()
    comm: CommParams = CommParams()
    mobility: MobilityParams = MobilityParams()
    horizon: int = 100
    variant: Variant = Variant.MCDFP
    seed: int = 0
    replications: int = 50

    def __post_init__(self) -> None:
        starts = np.asarray(self.robot_starts, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if starts.ndim != 2 or starts.shape[1] != 2 or targets.ndim != 2 or targets.shape[1] != 2:
            raise ValueError("robot_starts and targets must be sequences of 2D points")
        if starts.shape[0] != targets.shape[0]:
            raise ValueError(
                f"robot and target counts must match, got {starts.shape[0]} vs {targets.shape[0]}"
            )
        object.__setattr__(self, "robot_starts", starts)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def n(self) -> int:
        return self.targets.shape[0]


@dataclass
class MetricsFrame:
    """Team-level observables for one timestep of one replication."""

    t: int
    ne_distance: float
    est_error: float
    attempts: int
    successes: int
    attempts_per_link: float
    success_ratio: float
    converged: bool
    actions: ActionProfile
    positions: np.ndarray


@dataclass
class RunResult:
    """One replication: its frames plus the post-hoc verdicts."""

    frames: list[MetricsFrame]
    converged_at: int | None
    ne_profile: ActionProfile | None
    covered: bool
    total_attempts: int
    final_cost: float
    optimal_cost: float


@dataclass
class BatchSummary:
    """Aggregates over a replication batch."""

    variant: str
    replications: int
    horizon: int
    seed: int
    coverage_rate: float
    convergence_rate: float
    converged_runs: int
    mean_converged_at: float | None
    total_attempts: int
    mean_final_cost: float
    optimal_cost: float
    mean_cost_gap: float
    mean_attempts_per_link: list[float]
    mean_success_ratio: list[float]
    mean_est_error: list[float]
    mean_ne_distance: list[float] | None

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "replications": self.replications,
            "horizon": self.horizon,
            "seed": self.seed,
            "coverage_rate": self.coverage_rate,
            "convergence_rate": self.convergence_rate,
            "converged_runs": self.converged_runs,
            "mean_converged_at": self.mean_converged_at,
            "total_attempts": self.total_attempts,
            "mean_final_cost": self.mean_final_cost,
            "optimal_cost": self.optimal_cost,
            "mean_cost_gap": self.mean_cost_gap,
            "mean_attempts_per_link": self.mean_attempts_per_link,
            "mean_success_ratio": self.mean_success_ratio,
            "mean_est_error": self.mean_est_error,
            "mean_ne_distance": self.mean_ne_distance,
        }


@dataclass
class BatchResult:
    results: list[RunResult]
    summary: BatchSummary


# Disjoint stream labels so decision draws never shift when link draws are added.
_ROBOT_STREAM = 0
_LINK_STREAM = 1


def replication_seed(seed: int, index: int) -> int:
    """Derived seed for one replication; stable prefix when extending --reps."""
    return seed ^ index


def robot_streams(run_seed: int, n: int) -> list[np.random.Generator]:
    """One decision generator per robot, independent of everything else."""
    return [
        np.random.default_rng(np.random.SeedSequence(entropy=run_seed, spawn_key=(_ROBOT_STREAM, i)))
        for i in range(n)
    ]

def link_uniforms(run_seed: int, t: int, n: int) -> np.ndarray:
    """Uniform draw table for step t; cell (i, j) is fixed to the directed link
    i->j regardless of the order links are evaluated in."""
    ss = np.random.SeedSequence(entropy=run_seed, spawn_key=(_LINK_STREAM, t))
    words = ss.generate_state(n * n, np.uint64)
    return ((words >> np.uint64(11)) * 2.0**-53).reshape(n, n)


def _estimation_error(states: list[AgentState]) -> float:
    """Sum over ordered pairs of how far j's estimate of i is from i's truth."""
    total = 0.0
    for st in states:
        for other in states:
            if other.id == st.id:
                continue
            total += norm_diff(st.own_freq, other.est_freq[st.id])
    return total


def simulate_step(
    states: list[AgentState],
    config: ScenarioConfig,
    costs: np.ndarray,
    streams: list[np.random.Generator],
    run_seed: int,
    t: int,
) -> MetricsFrame:
    """Advance every robot through one synchronous step.

    Order: action selection, own-frequency update, communication round
    (voluntary weights and rates, or the fixed baseline), post-exchange
    mobility weights (full variant only), heading selection, and the move.
    The convergence fields of the returned frame are filled in post-hoc.
    """
    n = len(states)
    for st, rng in zip(states, streams):
        st.action = select_action(st, costs, config.learn, rng)
    for st in states:
        update_own_frequency(st, config.learn)

    table = link_uniforms(run_seed, t, n)
    protocol = "fixed" if config.variant is Variant.DFP else "voluntary"
    outcomes = run_comm_round(
        states, config.comm, config.learn, lambda i, j: table[i, j], protocol
    )

    new_positions = []
    for st in states:
        own_target = config.targets[st.action]
        if config.variant is Variant.MCDFP:
            pulls = {
                j: comm_weight(st.own_freq, st.action, st.est_freq[j], st.shadow_freq[j], config.comm)
                for j in st.est_freq
            }
            peer_locs = {
                j: estimate_final_position(st.est_freq[j], config.targets)
                for j, v in pulls.items()
                if v > 0.0
            }
            heading = select_direction(own_target, peer_locs, pulls)
        else:
            heading = select_direction(own_target, {}, {})
        new_positions.append(step_position(st.position, heading, config.mobility))
    for st, pos in zip(states, new_positions):
        st.position = pos

    attempts = sum(1 for o in outcomes if o.attempted)
    successes = sum(1 for o in outcomes if o.success)
    links = n * (n - 1)
    return MetricsFrame(
        t=t,
        ne_distance=float("nan"),
        est_error=_estimation_error(states),
        attempts=attempts,
        successes=successes,
        attempts_per_link=attempts / links if links else 0.0,
        success_ratio=successes / attempts if attempts else 0.0,
        converged=False,
        actions=tuple(st.action for st in states),
        positions=np.array([st.position for st in states]),
    )


def run_replication(config: ScenarioConfig, index: int) -> RunResult:
    """Simulate one full horizon with the replication's derived seed."""
    n = config.n
    costs = cost_matrix(config.robot_starts, config.targets)
    run_seed = replication_seed(config.seed, index)
    streams = robot_streams(run_seed, n)
    states = [initial_state(i, config.robot_starts[i], n) for i in range(n)]

    frames: list[MetricsFrame] = []
    freq_history: list[np.ndarray] = []
    for t in range(1, config.horizon + 1):
        frames.append(simulate_step(states, config, costs, streams, run_seed, t))
        freq_history.append(np.array([st.own_freq for st in states]))

    # Convergence: the profile held from some step through the end, if it is
    # a pure equilibrium. Distances to it are only defined once it exists.
    last = frames[-1].actions
    start = len(frames) - 1
    while start > 0 and frames[start - 1].actions == last:
        start -= 1
    converged_at = None
    ne_profile = None
    if is_pure_ne(last, costs):
        converged_at = frames[start].t
        ne_profile = last
        stars = [action_vector(k, n) for k in ne_profile]
        for frame, freqs in zip(frames, freq_history):
            frame.ne_distance = sum(norm_diff(freqs[i], stars[i]) for i in range(n))
            frame.converged = frame.t >= converged_at

    covered = coverage_achieved(
        [st.position for st in states], last, config.targets, config.mobility.coverage_tol
    )
    _, opt_cost = optimal_assignment(costs)
    return RunResult(
        frames=frames,
        converged_at=converged_at,
        ne_profile=ne_profile,
        covered=covered,
        total_attempts=sum(f.attempts for f in frames),
        final_cost=assignment_cost(last, costs),
        optimal_cost=opt_cost,
    )


def summarize(config: ScenarioConfig, results: list[RunResult]) -> BatchSummary:
    reps = len(results)
    horizon = config.horizon
    converged = [r for r in results if r.converged_at is not None]
    mean_ne = None
    if converged:
        mean_ne = [
            float(np.mean([r.frames[t].ne_distance for r in converged]))
            for t in range(horizon)
        ]
    return BatchSummary(
        variant=config.variant.value,
        replications=reps,
        horizon=horizon,
        seed=config.seed,
        coverage_rate=sum(r.covered for r in results) / reps,
        convergence_rate=len(converged) / reps,
        converged_runs=len(converged),
        mean_converged_at=(
            float(np.mean([r.converged_at for r in converged])) if converged else None
        ),
        total_attempts=sum(r.total_attempts for r in results),
        mean_final_cost=float(np.mean([r.final_cost for r in results])),
        optimal_cost=results[0].optimal_cost,
        mean_cost_gap=float(np.mean([r.final_cost - r.optimal_cost for r in results])),
        mean_attempts_per_link=[
            float(np.mean([r.frames[t].attempts_per_link for r in results]))
            for t in range(horizon)
        ],
        mean_success_ratio=[
            float(np.mean([r.frames[t].success_ratio for r in results]))
            for t in range(horizon)
        ],
        mean_est_error=[
            float(np.mean([r.frames[t].est_error for r in results])) for t in range(horizon)
        ],
        mean_ne_distance=mean_ne,
    )


def attempts_ratio(summary: BatchSummary, reference: BatchSummary) -> float:
    """Total communication attempts relative to a reference batch (e.g. the
    always-transmit baseline)."""
    if reference.total_attempts == 0:
        raise ValueError("reference batch made no communication attempts")
    return summary.total_attempts / reference.total_attempts


def run_batch(config: ScenarioConfig, max_workers: int = 1) -> BatchResult:
    """Run every replication with its derived seed and aggregate.

    Replications are independent; `max_workers > 1` fans them out to worker
    processes. Results are collected by replication index, so the output is
    identical regardless of worker count.
    """
    indices = range(config.replications)
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run_replication, [config] * config.replications, indices))
    else:
        results = [run_replication(config, i) for i in indices]
    return BatchResult(results=results, summary=summarize(config, results))


#: Parameter quadruples (rho1, rho2, eta1, eta2) of the standard sensitivity sweep.
DEFAULT_SWEEP_CELLS: tuple[tuple[float, float, float, float], ...] = (
    (0.5, 1.0, 0.1, 0.4),
    (0.1, 0.2, 0.1, 0.4),
    (0.5, 1.0, 0.2, 1.5),
    (0.1, 0.2, 0.2, 1.5),
)


@dataclass
class SweepCell:
    rho1: float
    rho2: float
    eta1: float
    eta2: float
    batch: BatchResult


def parameter_sweep(
    config: ScenarioConfig,
    cells: tuple[tuple[float, float, float, float], ...] = DEFAULT_SWEEP_CELLS,
    max_workers: int = 1,
) -> list[SweepCell]:
    """Run one batch per (rho1, rho2, eta1, eta2) cell on the base scenario."""
    cells = tuple(cells)
    if not cells:
        raise ValueError("sweep needs at least one parameter cell")
    out = []
    for rho1, rho2, eta1, eta2 in cells:
        cfg = replace(
            config,
            learn=replace(config.learn, rho1=rho1, rho2=rho2),
            comm=replace(config.comm, eta1=eta1, eta2=eta2),
        )
        out.append(SweepCell(rho1, rho2, eta1, eta2, run_batch(cfg, max_workers)))
    return out
