import itertools

import numpy as np
import pytest

from reachgame import (
    ConfigurationError,
    GameSpec,
    PlayerMdp,
    Policy,
    avoid_indicator,
    joint_reach_avoid,
    policy_kernel,
    reach_indicator,
    trajectory_probability,
    validate_game,
)

from conftest import random_game, random_policies


def two_state_mdp():
    # action 0 = stay, action 1 = go (0 -> 1, 1 -> 1)
    kernel = np.zeros((2, 2, 2))
    kernel[0, 0, 0] = 1.0
    kernel[0, 1, 1] = 1.0
    kernel[1, 0, 1] = 1.0
    kernel[1, 1, 1] = 1.0
    return PlayerMdp(kernel, [1.0, 0.0], [1])


class TestPolicyKernel:
    def test_deterministic_composition(self):
        mdp = two_state_mdp()
        policy = Policy.deterministic(0, np.array([[1, 0]]), 2)
        y = policy_kernel(mdp, policy, 0)
        assert y[0, 1] == 1.0

    def test_convex_mixture(self):
        mdp = two_state_mdp()
        table = np.array([[[0.5, 0.5], [1.0, 0.0]]])
        y = policy_kernel(mdp, Policy(0, table), 0)
        assert y[0, 1] == pytest.approx(0.5, abs=0)
        assert y[0, 0] == pytest.approx(0.5, abs=0)

    def test_rows_sum_to_one_seeded(self):
        game = random_game(11, state_count=3, action_count=2, horizon=3)
        mdp = game.players[0]
        policy = Policy.uniform(0, 3, 3, 2)
        for t in range(3):
            y = policy_kernel(mdp, policy, t)
            np.testing.assert_allclose(y.sum(axis=1), 1.0, atol=1e-12, rtol=0)

    def test_affine_in_policy_row(self):
        game = random_game(3)
        mdp = game.players[0]
        pol_a = random_policies(game, 5)[0]
        pol_b = random_policies(game, 6)[0]
        lam = 0.375
        mixed = pol_a.table.copy()
        mixed[1, 2] = lam * pol_a.table[1, 2] + (1 - lam) * pol_b.table[1, 2]
        y_a = policy_kernel(mdp, pol_a, 1)
        y_mix = policy_kernel(mdp, Policy(0, mixed), 1)
        swapped = pol_a.table.copy()
        swapped[1, 2] = pol_b.table[1, 2]
        y_b_row = policy_kernel(mdp, Policy(0, swapped), 1)[2]
        np.testing.assert_allclose(
            y_mix[2], lam * y_a[2] + (1 - lam) * y_b_row, atol=1e-14, rtol=0
        )
        # untouched rows are bit-identical
        assert np.array_equal(np.delete(y_mix, 2, axis=0), np.delete(y_a, 2, axis=0))

    def test_dimension_mismatch(self):
        mdp = two_state_mdp()
        with pytest.raises(ConfigurationError):
            policy_kernel(mdp, Policy.uniform(0, 1, 3, 2), 0)
        with pytest.raises(ConfigurationError):
            policy_kernel(mdp, Policy.uniform(0, 1, 2, 2), 5)


class TestTrajectoryProbability:
    def test_deterministic_chain(self):
        kernel = np.zeros((3, 1, 3))
        kernel[0, 0, 1] = 1.0
        kernel[1, 0, 2] = 1.0
        kernel[2, 0, 2] = 1.0
        mdp = PlayerMdp(kernel, [1.0, 0, 0], [2])
        policy = Policy.uniform(0, 2, 3, 1)
        assert trajectory_probability(mdp, policy, [0, 1, 2]) == 1.0

    def test_unreachable_start(self):
        mdp = two_state_mdp()
        policy = Policy.uniform(0, 1, 2, 2)
        assert trajectory_probability(mdp, policy, [1, 1]) == 0.0

    def test_enumeration_sums_to_one(self):
        game = random_game(2, point_starts=False)
        mdp = game.players[0]
        policy = random_policies(game, 9)[0]
        total = sum(
            trajectory_probability(mdp, policy, traj)
            for traj in itertools.product(range(3), repeat=3)
        )
        assert total == pytest.approx(1.0, abs=1e-10)


class TestIndicators:
    def test_reach(self):
        mdp = two_state_mdp()
        assert reach_indicator(mdp, 1) == 1
        assert reach_indicator(mdp, 0) == 0

    def test_reach_full_target_set(self):
        kernel = np.zeros((2, 1, 2))
        kernel[:, 0, 0] = 1.0
        mdp = PlayerMdp(kernel, [1.0, 0.0], [0, 1])
        assert all(reach_indicator(mdp, s) == 1 for s in range(2))

    def test_avoid(self):
        assert avoid_indicator(0, 0, 3, 3) == 1
        assert avoid_indicator(0, 1, 3, 3) == 0
        assert avoid_indicator(0, 1, 3, 4) == 1


class TestJointReachAvoid:
    def setup_method(self):
        # deterministic-friendly 4-state game: player 0 targets 3, player 1 targets 0
        kernel = np.zeros((4, 1, 4))
        kernel[:, 0, :] = 0.25
        p0 = PlayerMdp(kernel, [1, 0, 0, 0], [3])
        p1 = PlayerMdp(kernel, [0, 0, 0, 1], [0])
        self.game = GameSpec((p0, p1), 2)

    def test_success(self):
        assert joint_reach_avoid([[0, 1, 3], [3, 2, 0]], self.game) == 1

    def test_collision_at_start(self):
        assert joint_reach_avoid([[0, 1, 3], [0, 2, 0]], self.game) == 0

    def test_missed_target(self):
        assert joint_reach_avoid([[0, 1, 2], [3, 2, 0]], self.game) == 0

    def test_relabeling_symmetry(self):
        game = self.game
        swapped = GameSpec((game.players[1], game.players[0]), game.horizon)
        rng = np.random.default_rng(0)
        for _ in range(30):
            trajs = rng.integers(0, 4, size=(2, 3))
            assert joint_reach_avoid(trajs, game) == joint_reach_avoid(
                trajs[::-1], swapped
            )


class TestValidateGame:
    def test_well_formed(self):
        assert validate_game(random_game(1)).ok

    def test_bad_kernel_row(self):
        kernel = np.zeros((2, 1, 2))
        kernel[0, 0, 0] = 0.9
        kernel[1, 0, 1] = 1.0
        game = GameSpec((PlayerMdp(kernel, [1, 0], [1]),), 1)
        report = validate_game(game)
        assert not report.ok
        assert any(
            "player 0, state 0, action 0" in v.location for v in report.violations
        )

    def test_empty_target_set(self):
        kernel = np.zeros((2, 1, 2))
        kernel[:, 0, 0] = 1.0
        game = GameSpec((PlayerMdp(kernel, [1, 0], []),), 1)
        report = validate_game(game)
        assert any("target set is empty" in v.message for v in report.violations)
