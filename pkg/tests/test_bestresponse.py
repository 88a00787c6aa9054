import itertools

import numpy as np
import pytest

from reachgame import (
    ConfigurationError,
    EpsilonSchedule,
    GameSpec,
    PlayerMdp,
    Policy,
    best_response,
    enumerate_F,
    greedy_action,
    potential_value,
    stochastic_obstacle_term,
)

from conftest import random_game, random_policies, single_player_chain


def exhaustive_best_value(game, i, policies):
    """Independent oracle: max objective over every deterministic local
    policy of player i, each evaluated by trajectory enumeration."""
    s_count = game.state_count
    a_count = game.players[i].action_count
    best = -1.0
    for flat in itertools.product(range(a_count), repeat=s_count * game.horizon):
        actions = np.array(flat, dtype=np.int64).reshape(game.horizon, s_count)
        candidate = list(policies)
        candidate[i] = Policy.deterministic(i, actions, a_count)
        best = max(best, enumerate_F(game, candidate))
    return best


class TestGreedyAction:
    def test_plain_max(self):
        assert greedy_action([0.2, 0.9]) == 1

    def test_tie_breaks_low(self):
        assert greedy_action([0.5, 0.5]) == 0

    def test_all_dead(self):
        assert greedy_action([0.0, 0.0, 0.0]) == 0


class TestStochasticObstacleTerm:
    def test_point_masses_distinct(self):
        occ = np.zeros(9)
        occ[1 * 3 + 2] = 1.0  # opponents parked at 1 and 2
        assert stochastic_obstacle_term(occ, 2, 3, 0) == 1.0

    def test_single_opponent_on_top(self):
        occ = np.zeros(3)
        occ[2] = 1.0
        assert stochastic_obstacle_term(occ, 1, 3, 2) == 0.0

    def test_single_opponent_uniform(self):
        occ = np.full(4, 0.25)
        assert stochastic_obstacle_term(occ, 1, 4, 1) == pytest.approx(0.75, abs=1e-15)

    def test_point_mass_recovery_exhaustive(self):
        # every placement of two opponents on a 3x3 grid, every own state
        s_count = 9
        for s_a in range(s_count):
            for s_b in range(s_count):
                occ = np.zeros(s_count * s_count)
                occ[s_a * s_count + s_b] = 1.0
                for s_i in range(s_count):
                    indicator = float(s_a != s_b and s_i != s_a and s_i != s_b)
                    assert stochastic_obstacle_term(occ, 2, s_count, s_i) == indicator


class TestBestResponse:
    def test_single_player_chain(self):
        game = single_player_chain(4, horizon=3)
        result = best_response(game, 0, [None])
        assert result.achieved_value == pytest.approx(1.0, abs=0)
        # policy advances along the chain
        occ_state = 0
        for t in range(3):
            action = int(np.argmax(result.policy.table[t, occ_state]))
            assert action == 1
            occ_state += 1

    def test_decoupled_equals_single_player_optimum(self):
        # opponent parked on a state the responder's chain never visits
        chain = single_player_chain(4, horizon=3)
        parked_kernel = np.zeros((4, 2, 4))
        parked_kernel[:, 0, 3] = parked_kernel[:, 1, 3] = 1.0
        parked = PlayerMdp(parked_kernel, [0, 0, 0, 1], [3])
        own_kernel = chain.players[0].kernel.copy()
        # redirect the chain's advance to avoid state 3: 0->1->2, target 2
        own = PlayerMdp(own_kernel, [1, 0, 0, 0], [2])
        game = GameSpec((own, parked), 3)
        result = best_response(game, 0, [None, Policy.uniform(1, 3, 4, 2)])
        single = GameSpec((own,), 3)
        single_opt = best_response(single, 0, [None]).achieved_value
        # the parked opponent sits on its own target; joint success needs both
        assert result.achieved_value == pytest.approx(single_opt, abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_exhaustive_oracle(self, seed):
        game = random_game(seed, state_count=4, horizon=2)
        policies = random_policies(game, seed + 50)
        result = best_response(game, 0, policies)
        oracle = exhaustive_best_value(game, 0, policies)
        assert result.achieved_value == pytest.approx(oracle, abs=1e-10)

    @pytest.mark.parametrize("seed", range(4))
    def test_dominates_every_deterministic_policy(self, seed):
        game = random_game(seed + 30, state_count=3, horizon=2)
        policies = random_policies(game, seed + 90)
        result = best_response(game, 1, policies)
        for flat in itertools.product(range(2), repeat=6):
            actions = np.array(flat, dtype=np.int64).reshape(2, 3)
            candidate = list(policies)
            candidate[1] = Policy.deterministic(1, actions, 2)
            assert result.achieved_value >= enumerate_F(game, candidate) - 1e-10

    def test_consistent_with_potential_value(self):
        game = random_game(12, state_count=4, horizon=3)
        policies = random_policies(game, 60)
        result = best_response(game, 0, policies)
        joint = list(policies)
        joint[0] = result.policy
        assert result.achieved_value == pytest.approx(
            potential_value(game, joint), abs=1e-10
        )

    def test_projected_values_match_achieved(self):
        game = random_game(14, horizon=3)
        policies = random_policies(game, 61)
        result = best_response(game, 0, policies)
        expected = float(
            game.players[0].initial_dist @ result.projected_values[0]
        )
        assert result.achieved_value == pytest.approx(expected, abs=1e-10)

    def test_epsilon_never_improves(self):
        for seed in range(5):
            game = random_game(seed + 70, state_count=4, horizon=2)
            policies = random_policies(game, seed + 71)
            exact = best_response(game, 0, policies).achieved_value
            for eps in (1e-6, 1e-3, 1e-2):
                schedule = EpsilonSchedule(eps, 0.0, 1.0)
                truncated = best_response(game, 0, policies, schedule)
                assert truncated.achieved_value <= exact + 1e-12

    def test_zero_schedule_identical_to_none(self):
        game = random_game(33, horizon=3)
        policies = random_policies(game, 34)
        a = best_response(game, 0, policies)
        b = best_response(game, 0, policies, EpsilonSchedule.zero())
        assert a.achieved_value == b.achieved_value
        assert np.array_equal(a.policy.table, b.policy.table)

    def test_dead_rows_flagged(self):
        # unreachable target: every projected value is zero
        kernel = np.zeros((2, 2, 2))
        kernel[:, 0, 0] = kernel[:, 1, 0] = 1.0
        mdp = PlayerMdp(kernel, [1, 0], [1])
        game = GameSpec((mdp,), 2)
        result = best_response(game, 0, [None])
        assert result.dead_rows.all()
        assert (result.policy.table[:, :, 0] == 1.0).all()

    def test_opponent_mismatch_rejected(self):
        game = random_game(1)
        policies = random_policies(game, 2)
        with pytest.raises(ConfigurationError):
            best_response(game, 0, [policies[0]])
        bad = [policies[0], Policy.uniform(1, game.horizon, 5, 2)]
        with pytest.raises(ConfigurationError):
            best_response(game, 0, bad)
        swapped_owner = [None, Policy(0, policies[1].table)]
        with pytest.raises(ConfigurationError):
            best_response(game, 0, swapped_owner)
