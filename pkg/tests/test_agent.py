import math

import numpy as np
import pytest

from mcdfp.agent import (
    AgentState,
    LearnParams,
    initial_state,
    receive_frequency,
    record_ack,
    select_action,
    update_own_frequency,
)
from mcdfp.game import action_vector, is_frequency, norm_diff, uniform_frequency


class ScriptedRng:
    """Deterministic stand-in feeding select_action prescribed draws."""

    def __init__(self, randoms=(), ints=()):
        self._randoms = list(randoms)
        self._ints = list(ints)

    def random(self):
        return self._randoms.pop(0)

    def integers(self, n):
        return self._ints.pop(0) % n


def make_state(n=5, robot=0):
    return initial_state(robot, np.zeros(2), n)


class TestOwnFrequency:
    def test_one_step_from_uniform(self):
        state = make_state()
        state.action = 0
        update_own_frequency(state, LearnParams(rho1=0.4))
        assert state.own_freq == pytest.approx([0.52, 0.12, 0.12, 0.12, 0.12], abs=1e-15)

    def test_degenerate_fixed_point(self):
        state = make_state()
        state.own_freq = action_vector(3, 5)
        state.action = 3
        update_own_frequency(state, LearnParams(rho1=0.4))
        assert state.own_freq.tolist() == action_vector(3, 5).tolist()

    def test_geometric_decay_toward_repeated_action(self):
        rho1 = 0.37
        state = make_state()
        start_gap = norm_diff(state.own_freq, action_vector(2, 5))
        state.action = 2
        for t in range(1, 13):
            update_own_frequency(state, LearnParams(rho1=rho1))
            gap = norm_diff(state.own_freq, action_vector(2, 5))
            assert gap == pytest.approx((1 - rho1) ** t * start_gap, abs=1e-12)

    def test_simplex_preserved_under_random_updates(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            state = initial_state(0, np.zeros(2), n)
            params = LearnParams(rho1=float(rng.uniform(0.01, 0.99)))
            for _ in range(30):
                state.action = int(rng.integers(n))
                update_own_frequency(state, params)
            assert is_frequency(state.own_freq)

    def test_requires_action(self):
        state = make_state()
        with pytest.raises(ValueError):
            update_own_frequency(state, LearnParams())


class TestSelectAction:
    def test_inertia_returns_previous_action(self):
        state = make_state()
        state.action = 3
        costs = np.ones((5, 5))
        rng = ScriptedRng(randoms=[0.0])
        assert select_action(state, costs, LearnParams(inertia=0.05), rng) == 3

    def test_singleton_best_response(self):
        state = make_state(n=2)
        state.action = 0
        state.est_freq[1] = np.array([1.0, 0.0])
        costs = np.array([[2.0, 3.0], [1.0, 1.0]])
        rng = ScriptedRng(randoms=[0.9])
        assert select_action(state, costs, LearnParams(inertia=0.05), rng) == 1

    def test_sticky_tie_break_keeps_previous(self):
        state = make_state()
        state.action = 3
        costs = np.full((5, 5), 2.0)
        rng = ScriptedRng(randoms=[0.9])  # would raise if a tie draw were taken
        assert select_action(state, costs, LearnParams(inertia=0.05), rng) == 3

    def test_first_step_skips_inertia(self):
        state = make_state(n=2)
        costs = np.array([[1.0, 3.0], [1.0, 1.0]])
        # No random() value scripted: the bootstrap step must not draw inertia.
        rng = ScriptedRng()
        assert select_action(state, costs, LearnParams(inertia=0.05), rng) == 0

    def test_tie_break_draws_uniformly_among_candidates(self):
        state = make_state()
        costs = np.full((5, 5), 2.0)
        rng = ScriptedRng(ints=[2])
        assert select_action(state, costs, LearnParams(inertia=0.05), rng) == 2


class TestEstimates:
    def test_full_replacement(self):
        state = make_state()
        payload = np.array([0.7, 0.1, 0.1, 0.05, 0.05])
        receive_frequency(state, 2, payload, LearnParams(rho2=1.0))
        assert state.est_freq[2].tolist() == payload.tolist()

    def test_midpoint_blend(self):
        state = make_state(n=2, robot=0)
        state.est_freq[1] = np.array([1.0, 0.0])
        receive_frequency(state, 1, np.array([0.0, 1.0]), LearnParams(rho2=0.5))
        assert state.est_freq[1].tolist() == [0.5, 0.5]

    def test_unknown_sender_rejected(self):
        state = make_state()
        with pytest.raises(KeyError):
            receive_frequency(state, 0, uniform_frequency(5), LearnParams())

    def test_no_aliasing_with_payload(self):
        state = make_state()
        payload = uniform_frequency(5)
        receive_frequency(state, 1, payload, LearnParams(rho2=1.0))
        payload[0] = 99.0
        assert state.est_freq[1][0] == 0.2


class TestAcks:
    def test_replacement_mirrors_own_frequency(self):
        state = make_state()
        state.action = 1
        update_own_frequency(state, LearnParams(rho1=0.4, rho2=1.0))
        record_ack(state, 4, LearnParams(rho2=1.0))
        assert state.shadow_freq[4].tolist() == state.own_freq.tolist()
        assert norm_diff(state.own_freq, state.shadow_freq[4]) == 0.0

    def test_unknown_receiver_rejected(self):
        state = make_state()
        with pytest.raises(KeyError):
            record_ack(state, 0, LearnParams())


class TestLearnParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"rho1": 0.0},
            {"rho1": 1.0},
            {"rho2": 0.0},
            {"rho2": 1.1},
            {"inertia": 0.0},
            {"inertia": 1.0},
        ],
    )
    def test_interval_validation(self, kwargs):
        with pytest.raises(ValueError):
            LearnParams(**kwargs)

    def test_unit_learning_rate_admitted(self):
        assert LearnParams(rho2=1.0).rho2 == 1.0


def test_estimate_learning_is_geometric_under_forced_delivery():
    # A robot repeating one action whose transmissions all succeed teaches the
    # receiver at the same geometric rate its own frequency converges at.
    rho1, T = 0.4, 30
    sender = initial_state(1, np.zeros(2), 5)
    receiver = initial_state(0, np.zeros(2), 5)
    start_gap = norm_diff(sender.own_freq, action_vector(2, 5))
    params = LearnParams(rho1=rho1, rho2=1.0)
    for t in range(1, T + 1):
        sender.action = 2
        update_own_frequency(sender, params)
        if t < T:  # delivery window covers every step except the last
            receive_frequency(receiver, 1, sender.own_freq, params)
    gap = norm_diff(receiver.est_freq[1], action_vector(2, 5))
    assert gap <= 1e-3
    assert gap == pytest.approx((1 - rho1) ** (T - 1) * start_gap, abs=1e-9)
