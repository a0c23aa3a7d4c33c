"""Per-robot learning state and update rules.

Each robot tracks its own empirical action frequency, an estimate of every
other robot's frequency, and a shadow copy of what every other robot currently
believes about it (maintained through guaranteed acknowledgments).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .game import action_vector, best_response_set, uniform_frequency


@dataclass(frozen=True)
class LearnParams:
    """Learning constants: frequency fading, estimate learning rate, inertia."""

    rho1: float = 0.4
    rho2: float = 1.0
    inertia: float = 0.95

    def __post_init__(self) -> None:
        if not 0.0 < self.rho1 < 1.0:
            raise ValueError(f"rho1 must be in (0, 1), got {self.rho1}")
        if not 0.0 < self.rho2 <= 1.0:
            raise ValueError(f"rho2 must be in (0, 1], got {self.rho2}")
        if not 0.0 < self.inertia < 1.0:
            raise ValueError(f"inertia must be in (0, 1), got {self.inertia}")


@dataclass
class AgentState:
    """One robot's local state. Owned by the engine during a step."""

    id: int
    position: np.ndarray
    own_freq: np.ndarray
    est_freq: dict[int, np.ndarray] = field(default_factory=dict)
    shadow_freq: dict[int, np.ndarray] = field(default_factory=dict)
    action: int | None = None


def initial_state(robot: int, position: np.ndarray, n: int) -> AgentState:
    """Fresh state with uniform priors everywhere and no action taken yet."""
    others = [j for j in range(n) if j != robot]
    return AgentState(
        id=robot,
        position=np.asarray(position, dtype=float).copy(),
        own_freq=uniform_frequency(n),
        est_freq={j: uniform_frequency(n) for j in others},
        shadow_freq={j: uniform_frequency(n) for j in others},
    )


def update_own_frequency(state: AgentState, params: LearnParams) -> np.ndarray:
    """Fold the current action into the empirical frequency (fading average)."""
    if state.action is None:
        raise ValueError("no action selected this step")
    n = state.own_freq.shape[0]
    state.own_freq = (1.0 - params.rho1) * state.own_freq + params.rho1 * action_vector(
        state.action, n
    )
    return state.own_freq


def select_action(
    state: AgentState, costs: np.ndarray, params: LearnParams, rng: np.random.Generator
) -> int:
    """Best response to the current estimates, with inertia.

    With probability `inertia` the previous action is repeated. Otherwise the
    robot minimizes expected cost; a tie including the previous action keeps
    it (sticky), other ties break uniformly at random. On the very first step
    there is no previous action: plain best response to the uniform priors.
    """
    if state.action is not None and rng.random() < params.inertia:
        return state.action
    candidates = best_response_set(state.id, state.est_freq, costs)
    if state.action in candidates:
        return state.action
    if len(candidates) == 1:
        return candidates[0]
    return candidates[int(rng.integers(len(candidates)))]


def receive_frequency(
    state: AgentState, sender: int, payload: np.ndarray, params: LearnParams
) -> np.ndarray:
    """Blend a received frequency into the estimate for the sender."""
    if sender not in state.est_freq:
        raise KeyError(f"unknown sender id {sender}")
    state.est_freq[sender] = (1.0 - params.rho2) * state.est_freq[sender] + params.rho2 * payload
    return state.est_freq[sender]


def record_ack(state: AgentState, receiver: int, params: LearnParams) -> np.ndarray:
    """Mirror a successful delivery: the receiver now blended in our frequency,
    so apply the same update to our shadow copy of its estimate."""
    if receiver not in state.shadow_freq:
        raise KeyError(f"unknown receiver id {receiver}")
    state.shadow_freq[receiver] = (
        1.0 - params.rho2
    ) * state.shadow_freq[receiver] + params.rho2 * state.own_freq
    return state.shadow_freq[receiver]
