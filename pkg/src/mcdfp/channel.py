"""Stochastic wireless layer: voluntary communication weights, routing rates,
fading link success, and one synchronous exchange round with acknowledgments."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .agent import AgentState, LearnParams, receive_frequency, record_ack
from .game import action_vector, norm_diff

#: Bernoulli draw for link (sender, receiver); success iff draw < success probability.
LinkDraw = Callable[[int, int], float]

PROTOCOLS = ("voluntary", "fixed")


@dataclass(frozen=True)
class CommParams:
    """Thresholds and channel constants for the communication layer."""

    eta1: float = 0.1
    eta2: float = 0.4
    delta1: float = 0.1
    fading_r: float = 0.65

    def __post_init__(self) -> None:
        if self.eta1 < 0.0 or self.eta2 < 0.0:
            raise ValueError("thresholds eta1, eta2 must be nonnegative")
        if self.delta1 <= 0.0:
            raise ValueError(f"delta1 must be positive, got {self.delta1}")
        if self.fading_r <= 0.0:
            raise ValueError(f"fading_r must be positive, got {self.fading_r}")


@dataclass(frozen=True)
class LinkOutcome:
    """Result of one directed link in a communication round."""

    sender: int
    receiver: int
    attempted: bool
    rate: float
    success_prob: float
    success: bool


def comm_weight(
    own_freq: np.ndarray,
    action: int,
    est_freq_j: np.ndarray,
    shadow_freq_j: np.ndarray,
    params: CommParams,
) -> float:
    """Voluntary communication weight toward one receiver.

    Zero when the sender's frequency has settled (low novelty) and the
    receiver already tracks it well; otherwise the inverse of the frequency
    overlap with the receiver, capped at 1/delta1.
    """
    novelty = norm_diff(own_freq, action_vector(action, own_freq.shape[0]))
    tracking_error = norm_diff(own_freq, shadow_freq_j)
    if novelty <= params.eta1 and tracking_error <= params.eta2:
        return 0.0
    overlap = max(params.delta1, norm_diff(own_freq, est_freq_j))
    return 1.0 / overlap


def allocate_rates(weights: Mapping[int, float]) -> dict[int, float]:
    """Split the unit routing budget proportionally to the weights.

    This is the exact maximizer of the weighted-log rate objective under a
    unit budget. All-zero weights allocate nothing. When any weight is
    positive the returned rates sum to exactly 1.0 (the largest rate absorbs
    the float residual).
    """
    for j, w in weights.items():
        if w < 0.0:
            raise ValueError(f"negative weight {w} for receiver {j}")
    total = sum(weights.values())
    if total == 0.0:
        return {j: 0.0 for j in weights}
    # The largest receiver absorbs the rounding residual and sits last in
    # iteration order, so a left-to-right float sum of the rates is exactly 1.
    top = max(weights, key=weights.get)
    rates = {}
    acc = 0.0
    for j, w in weights.items():
        if j == top:
            continue
        rates[j] = w / total
        acc += rates[j]
    rates[top] = 1.0 - acc
    return rates


def link_success_prob(
    rate: float, pos_i: np.ndarray, pos_j: np.ndarray, params: CommParams
) -> float:
    """Delivery probability: allocated rate damped by squared-distance fading."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    d = pos_i - pos_j
    return rate * math.exp(-params.fading_r * float(d @ d))


def run_comm_round(
    states: Sequence[AgentState],
    comm: CommParams,
    learn: LearnParams,
    draw: LinkDraw,
    protocol: str = "voluntary",
) -> list[LinkOutcome]:
    """One synchronous exchange over every directed pair.

    Voluntary protocol: each sender weights its receivers and splits the unit
    budget over the positive-weight ones; a link is attempted iff its rate is
    positive. Fixed protocol: every link is attempted at rate 1/(N-1).

    All payloads are the senders' frequencies from before the round, so the
    outcome does not depend on pair iteration order. Every delivery triggers
    an acknowledgment that keeps the sender's shadow copy exact.
    """
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    n = len(states)
    if n <= 1:
        return []

    if protocol == "fixed":
        flat = 1.0 / (n - 1)
        rate_for = {st.id: {j: flat for j in st.est_freq} for st in states}
    else:
        rate_for = {}
        for st in states:
            weights = {
                j: comm_weight(st.own_freq, st.action, st.est_freq[j], st.shadow_freq[j], comm)
                for j in st.est_freq
            }
            rate_for[st.id] = allocate_rates(weights)

    by_id = {st.id: st for st in states}
    outcomes = []
    for st in states:
        for j in st.est_freq:
            rate = rate_for[st.id][j]
            attempted = protocol == "fixed" or rate > 0.0
            if attempted:
                prob = link_success_prob(rate, st.position, by_id[j].position, comm)
                success = draw(st.id, j) < prob
            else:
                prob = 0.0
                success = False
            if success:
                receive_frequency(by_id[j], st.id, st.own_freq, learn)
                record_ack(st, j, learn)
            outcomes.append(
                LinkOutcome(
                    sender=st.id,
                    receiver=j,
                    attempted=attempted,
                    rate=rate,
                    success_prob=prob,
                    success=success,
                )
            )
    return outcomes
