"""Joint-state value recursion for a fixed joint policy.

The value table at time t lives on the packed joint state space (length
S**N).  Only two buffers (t and t+1) ever exist; the backward step contracts
the next-time table with one per-player transition matrix at a time
(N tensor-vector products instead of an S**N-way sum per state, which is
exact because player transitions are independent) and then applies the
pairwise-distinct mask.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import masked_value_contract
from .errors import ConfigurationError
from .game import GameSpec, Policy, policy_kernel
from .indexing import collision_free_mask, joint_digits


@dataclass(frozen=True)
class JointValue:
    """Flat value table over packed joint states at one time step."""

    t: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def terminal_value(game: GameSpec) -> JointValue:
    """Indicator table at the final time: 1 iff every player is inside its
    target and all players occupy pairwise distinct states."""
    n, s_count = game.n_players, game.state_count
    digits = joint_digits(s_count, n)
    values = collision_free_mask(s_count, n).copy()
    for i, mdp in enumerate(game.players):
        values *= mdp.target_mask[digits[:, i]]
    return JointValue(game.horizon, values)


def _check_joint_policy(game: GameSpec, joint_policy: Sequence[Policy]):
    if len(joint_policy) != game.n_players:
        raise ConfigurationError(
            f"{len(joint_policy)} policies for {game.n_players} players"
        )
    for i, pol in enumerate(joint_policy):
        if pol.horizon != game.horizon:
            raise ConfigurationError(
                f"policy {i} has horizon {pol.horizon}, game has {game.horizon}"
            )


def backward_step(
    game: GameSpec, joint_policy: Sequence[Policy], v_next: JointValue
) -> JointValue:
    """One step of the recursion: expected next value under every player's
    kernel-under-policy, zeroed at colliding joint states."""
    _check_joint_policy(game, joint_policy)
    t = v_next.t - 1
    if t < 0:
        raise ConfigurationError("cannot step backwards from t = 0")
    kernels = [
        policy_kernel(game.players[j], joint_policy[j], t)
        for j in range(game.n_players)
    ]
    mask = collision_free_mask(game.state_count, game.n_players)
    return JointValue(t, masked_value_contract(v_next.values, kernels, mask))


def potential_value(game: GameSpec, joint_policy: Sequence[Policy]) -> float:
    """Success probability of the joint policy: expectation of the t = 0
    value table under the product of initial distributions."""
    v = terminal_value(game)
    for _ in range(game.horizon):
        v = backward_step(game, joint_policy, v)
    return expected_initial_value(game, v.values)


def expected_initial_value(game: GameSpec, values_flat: np.ndarray) -> float:
    """Contract a flat joint-state table with the product initial law."""
    n, s_count = game.n_players, game.state_count
    w = values_flat.reshape((s_count,) * n)
    for mdp in game.players:
        w = np.tensordot(mdp.initial_dist, w, axes=([0], [0]))
    return float(w)
