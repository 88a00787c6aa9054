"""Evaluation metrics: objective, collision likelihood, reach reduction.

Each metric has an exact flavor (joint-state forward propagation, feasible
while S**N stays within the guard) and a Monte-Carlo flavor (seeded joint
trajectory simulation with binomial standard errors).  The dispatcher
``compute_metrics`` assembles a record per best-response iteration and falls
back to Monte Carlo with a warning when the exact guard is exceeded.
"""

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import masked_value_contract
from .errors import ConfigurationError, DegenerateScenarioError, SizeGuardError
from .game import GameSpec, Policy, policy_kernels
from .indexing import collision_free_mask
from .jointvalue import potential_value
from .occupancy import forward_propagate

EXACT_JOINT_GUARD = 10**6


@dataclass(frozen=True)
class MetricsRecord:
    iteration: int
    potential: float
    collision_likelihood: float
    reach_reduction: float
    method: str
    trials: int | None = None
    collision_se: float | None = None
    reach_se: float | None = None
    seed: int | None = None


def simulate_trajectories(
    game: GameSpec, joint_policy: Sequence[Policy], trials: int, seed: int
) -> np.ndarray:
    """Sample ``trials`` independent joint trajectories; shape (K, N, T+1).

    Players are simulated independently (their chains never interact), each
    from its own kernel-under-policy; draws come from one generator seeded by
    ``seed`` in a fixed (player, time) order, so results are reproducible.
    """
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    n, horizon, s_count = game.n_players, game.horizon, game.state_count
    out = np.empty((trials, n, horizon + 1), dtype=np.int64)
    for j in range(n):
        kernels = policy_kernels(game.players[j], joint_policy[j])
        cum0 = np.cumsum(game.players[j].initial_dist)
        states = np.minimum(
            (cum0[None, :] <= rng.random((trials, 1))).sum(axis=1), s_count - 1
        )
        out[:, j, 0] = states
        for t in range(horizon):
            cum = np.cumsum(kernels[t], axis=1)
            rows = cum[states]
            states = np.minimum(
                (rows <= rng.random((trials, 1))).sum(axis=1), s_count - 1
            )
            out[:, j, t + 1] = states
    return out


def _any_collision(trajectories: np.ndarray) -> np.ndarray:
    """Per-trial indicator that two distinct players ever share a state."""
    n = trajectories.shape[1]
    hit = np.zeros(trajectories.shape[0], dtype=bool)
    for a in range(n):
        for b in range(a + 1, n):
            hit |= np.any(trajectories[:, a, :] == trajectories[:, b, :], axis=1)
    return hit


def collision_likelihood_exact(game: GameSpec, joint_policy: Sequence[Policy]) -> float:
    """Probability two distinct players ever share a state, by joint forward
    propagation that zeroes colliding joint states at every step."""
    n, s_count = game.n_players, game.state_count
    if s_count**n > EXACT_JOINT_GUARD:
        raise SizeGuardError(
            f"S^N = {s_count**n} exceeds the exact-metric guard {EXACT_JOINT_GUARD}"
        )
    mask = collision_free_mask(s_count, n)
    alive = np.ones(1)
    for mdp in game.players:
        alive = (alive[:, None] * mdp.initial_dist[None, :]).reshape(-1)
    alive = alive * mask
    all_kernels = [policy_kernels(game.players[j], joint_policy[j]) for j in range(n)]
    for t in range(game.horizon):
        alive = masked_value_contract(
            alive, [np.ascontiguousarray(k[t].T) for k in all_kernels], mask
        )
    return 1.0 - float(alive.sum())


def collision_likelihood_mc(
    game: GameSpec, joint_policy: Sequence[Policy], trials: int, seed: int
):
    """Monte-Carlo collision probability with its binomial standard error."""
    hit = _any_collision(simulate_trajectories(game, joint_policy, trials, seed))
    p_hat = float(hit.mean())
    return p_hat, float(np.sqrt(p_hat * (1.0 - p_hat) / trials))


def _shortest_path_denominator(game: GameSpec, sp_policies: Sequence[Policy]) -> float:
    den = 1.0
    for j, mdp in enumerate(game.players):
        occ = forward_propagate(mdp, sp_policies[j])
        den *= float((occ.table[-1] * mdp.target_mask).sum())
    return den


def reach_reduction_exact(
    game: GameSpec, joint_policy: Sequence[Policy], sp_policies: Sequence[Policy]
) -> float:
    """All-players-in-target probability at the final time (no avoidance
    term; player chains are independent, so it factorizes over players),
    divided by the product of single-player shortest-path reach
    probabilities."""
    den = _shortest_path_denominator(game, sp_policies)
    if den <= 0.0:
        raise DegenerateScenarioError(
            "shortest-path policies reach no target; reduction undefined"
        )
    num = 1.0
    for j, mdp in enumerate(game.players):
        occ = forward_propagate(mdp, joint_policy[j])
        num *= float((occ.table[-1] * mdp.target_mask).sum())
    return num / den


def reach_reduction_mc(
    game: GameSpec,
    joint_policy: Sequence[Policy],
    sp_policies: Sequence[Policy],
    trials: int,
    seed: int,
):
    """Monte-Carlo numerator over the exact denominator, with the numerator's
    binomial standard error propagated through the ratio."""
    den = _shortest_path_denominator(game, sp_policies)
    if den <= 0.0:
        raise DegenerateScenarioError(
            "shortest-path policies reach no target; reduction undefined"
        )
    trajs = simulate_trajectories(game, joint_policy, trials, seed)
    in_target = np.ones(trials, dtype=bool)
    for j, mdp in enumerate(game.players):
        in_target &= mdp.target_mask[trajs[:, j, -1]].astype(bool)
    p_hat = float(in_target.mean())
    return p_hat / den, float(np.sqrt(p_hat * (1.0 - p_hat) / trials) / den)


def potential_mc(game: GameSpec, joint_policy: Sequence[Policy], trials: int, seed: int):
    """Monte-Carlo estimate of the objective: empirical success frequency."""
    trajs = simulate_trajectories(game, joint_policy, trials, seed)
    ok = ~_any_collision(trajs)
    for j, mdp in enumerate(game.players):
        ok &= mdp.target_mask[trajs[:, j, -1]].astype(bool)
    p_hat = float(ok.mean())
    return p_hat, float(np.sqrt(p_hat * (1.0 - p_hat) / trials))


def compute_metrics(
    game: GameSpec,
    joint_policy: Sequence[Policy],
    sp_policies: Sequence[Policy],
    iteration: int,
    method: str = "exact",
    trials: int = 50,
    seed: int = 0,
) -> MetricsRecord:
    """One metrics record for the current joint policy."""
    if method == "exact":
        try:
            collision = collision_likelihood_exact(game, joint_policy)
            reach = reach_reduction_exact(game, joint_policy, sp_policies)
            potential = potential_value(game, joint_policy)
            return MetricsRecord(iteration, potential, collision, reach, "exact")
        except SizeGuardError as exc:
            warnings.warn(f"{exc}; falling back to Monte Carlo", stacklevel=2)
            method = "monte-carlo"
    if method != "monte-carlo":
        raise ConfigurationError(f"unknown metric method {method!r}")
    potential, _ = potential_mc(game, joint_policy, trials, seed + 2)
    collision, c_se = collision_likelihood_mc(game, joint_policy, trials, seed)
    reach, r_se = reach_reduction_mc(game, joint_policy, sp_policies, trials, seed + 1)
    return MetricsRecord(
        iteration, potential, collision, reach, "monte-carlo", trials, c_se, r_se, seed
    )
