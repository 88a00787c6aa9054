import numpy as np
import pytest

from reachgame import (
    ConfigurationError,
    DegenerateScenarioError,
    GameSpec,
    GridSpec,
    PlayerMdp,
    Policy,
    collision_likelihood_exact,
    collision_likelihood_mc,
    compute_metrics,
    potential_value,
    random_scenario,
    reach_reduction_exact,
    reach_reduction_mc,
    simulate_trajectories,
)
from reachgame.game import policy_kernels
from reachgame.ibr import default_initial_policies
from reachgame.metrics import potential_mc

from conftest import random_game, random_policies


class TestSimulate:
    def test_deterministic_game_constant(self):
        spec = GridSpec(3, 3, 2, 4, stochasticity=1.0, seed=2)
        game = random_scenario(spec)
        policies = default_initial_policies(game)
        trajs = simulate_trajectories(game, policies, 16, seed=0)
        assert np.all(trajs == trajs[:1])

    def test_zero_trials_rejected(self):
        game = random_game(0)
        with pytest.raises(ConfigurationError):
            simulate_trajectories(game, random_policies(game, 1), 0, seed=0)

    def test_reproducible(self):
        game = random_game(5, point_starts=False)
        policies = random_policies(game, 6)
        a = simulate_trajectories(game, policies, 100, seed=9)
        b = simulate_trajectories(game, policies, 100, seed=9)
        assert np.array_equal(a, b)

    def test_transition_frequencies(self):
        game = random_game(4, state_count=4, horizon=2, point_starts=False)
        policies = random_policies(game, 7)
        trials = 100_000
        trajs = simulate_trajectories(game, policies, trials, seed=1)
        kernels = policy_kernels(game.players[0], policies[0])
        for t in range(2):
            for s in range(4):
                rows = trajs[:, 0, t] == s
                count = int(rows.sum())
                if count < 500:
                    continue
                freq = np.bincount(trajs[rows, 0, t + 1], minlength=4) / count
                sigma = np.sqrt(kernels[t, s] * (1 - kernels[t, s]) / count)
                assert np.all(np.abs(freq - kernels[t, s]) <= 3 * sigma + 1e-12)


def parked_game():
    """Two players pinned to distinct cells forever."""
    kernel = np.zeros((2, 1, 2))
    kernel[0, 0, 0] = kernel[1, 0, 1] = 1.0
    return GameSpec(
        (PlayerMdp(kernel, [1, 0], [0]), PlayerMdp(kernel, [0, 1], [1])), 3
    )


class TestCollisionLikelihood:
    def test_disjoint_regions_zero(self):
        game = parked_game()
        policies = [Policy.uniform(i, 3, 2, 1) for i in range(2)]
        assert collision_likelihood_exact(game, policies) == 0.0

    def test_shared_start_one(self):
        kernel = np.full((2, 1, 2), 0.5)
        game = GameSpec(
            (PlayerMdp(kernel, [1, 0], [0]), PlayerMdp(kernel, [1, 0], [1])), 2
        )
        policies = [Policy.uniform(i, 2, 2, 1) for i in range(2)]
        assert collision_likelihood_exact(game, policies) == 1.0

    def test_exact_vs_monte_carlo(self):
        game = random_game(9, state_count=4, horizon=3, point_starts=False)
        policies = random_policies(game, 10)
        exact = collision_likelihood_exact(game, policies)
        mc, se = collision_likelihood_mc(game, policies, 10_000, seed=3)
        assert abs(mc - exact) <= 4 * se + 1e-9


class TestReachReduction:
    def test_shortest_path_baseline_is_one(self):
        spec = GridSpec(4, 5, 2, 8, stochasticity=0.9, seed=4)
        game = random_scenario(spec)
        sp = default_initial_policies(game)
        assert reach_reduction_exact(game, sp, sp) == pytest.approx(1.0, abs=1e-12)

    def test_never_reaching_zero(self):
        # action 0 stays, action 1 crosses to the other cell
        kernel = np.zeros((2, 2, 2))
        kernel[0, 0, 0] = kernel[1, 0, 1] = 1.0
        kernel[0, 1, 1] = kernel[1, 1, 0] = 1.0
        game = GameSpec(
            (PlayerMdp(kernel, [1, 0], [1]), PlayerMdp(kernel, [0, 1], [0])), 3
        )
        sp = default_initial_policies(game)
        stay = [Policy.deterministic(i, np.zeros((3, 2), dtype=int), 2) for i in range(2)]
        assert reach_reduction_exact(game, stay, sp) == 0.0

    def test_degenerate_denominator(self):
        kernel = np.zeros((2, 1, 2))
        kernel[:, 0, 0] = 1.0
        game = GameSpec((PlayerMdp(kernel, [1, 0], [1]),), 2)
        sp = default_initial_policies(game)
        with pytest.raises(DegenerateScenarioError):
            reach_reduction_exact(game, sp, sp)

    def test_exact_vs_monte_carlo(self):
        spec = GridSpec(3, 4, 2, 6, stochasticity=0.85, seed=6)
        game = random_scenario(spec)
        sp = default_initial_policies(game)
        exact = reach_reduction_exact(game, sp, sp)
        mc, se = reach_reduction_mc(game, sp, sp, 20_000, seed=8)
        assert abs(mc - exact) <= 4 * se + 1e-9


class TestEstimatorCalibration:
    def test_mc_unbiased_coverage(self):
        game = random_game(15, state_count=4, horizon=3, point_starts=False)
        policies = random_policies(game, 16)
        exact = collision_likelihood_exact(game, policies)
        trials = 2000
        covered = 0
        for rep in range(20):
            mc, se = collision_likelihood_mc(game, policies, trials, seed=100 + rep)
            if abs(mc - exact) <= 1.96 * se:
                covered += 1
        assert covered >= 17

    def test_potential_bounded_by_metric_parts(self):
        for seed in range(5):
            game = random_game(40 + seed, state_count=4, horizon=3, point_starts=False)
            policies = random_policies(game, seed)
            f = potential_value(game, policies)
            no_collision = 1.0 - collision_likelihood_exact(game, policies)
            all_reach = 1.0
            from reachgame.occupancy import forward_propagate

            for j, mdp in enumerate(game.players):
                occ = forward_propagate(mdp, policies[j])
                all_reach *= float((occ.table[-1] * mdp.target_mask).sum())
            assert f <= min(no_collision, all_reach) + 1e-12

    def test_potential_mc_agrees(self):
        game = random_game(21, state_count=4, horizon=2, point_starts=False)
        policies = random_policies(game, 22)
        exact = potential_value(game, policies)
        est, se = potential_mc(game, policies, 20_000, seed=5)
        assert abs(est - exact) <= 4 * se + 1e-9


class TestComputeMetrics:
    def test_exact_record(self):
        spec = GridSpec(3, 3, 2, 4, stochasticity=0.9, seed=7)
        game = random_scenario(spec)
        sp = default_initial_policies(game)
        record = compute_metrics(game, sp, sp, iteration=0, method="exact")
        assert record.method == "exact"
        assert record.reach_reduction == pytest.approx(1.0, abs=1e-12)
        assert 0.0 <= record.collision_likelihood <= 1.0
        assert 0.0 <= record.potential <= 1.0

    def test_mc_record_has_errors(self):
        spec = GridSpec(3, 3, 2, 4, stochasticity=0.9, seed=7)
        game = random_scenario(spec)
        sp = default_initial_policies(game)
        record = compute_metrics(
            game, sp, sp, iteration=1, method="monte-carlo", trials=500, seed=3
        )
        assert record.method == "monte-carlo"
        assert record.trials == 500
        assert record.collision_se is not None and record.reach_se is not None

    def test_oversize_falls_back_with_warning(self):
        game = random_game(1, n_players=2, state_count=40, horizon=2,
                           point_starts=False)
        big = GameSpec(tuple(game.players) * 2, 2)  # 40^4 joint states
        policies = [
            Policy(i, p.table)
            for i, p in enumerate(random_policies(game, 2) * 2)
        ]
        sp = policies
        with pytest.warns(UserWarning, match="falling back"):
            record = compute_metrics(big, policies, sp, 0, method="exact", trials=50)
        assert record.method == "monte-carlo"
