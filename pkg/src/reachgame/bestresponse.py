"""Optimal local policy of one player against fixed opponents.

The backward sweep keeps the exact joint-state value table under the policy
built so far (two buffers only).  At each time step the candidate actions of
every local state are scored by the occupancy-projected continuation: the
sparse two-step opponent table weights the joint next values, the pairwise
no-collision indicator multiplies in, and the greedy row (lowest action index
on ties) is frozen.  The joint table is then rebuilt under that row via the
factorized contraction; when a truncation schedule is active, joint states
whose opponent block was dropped at time t are zeroed, so the achieved value
is the truncated under-approximation of the objective.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import br_action_values, masked_value_contract
from .errors import ConfigurationError
from .game import GameSpec, Policy, policy_kernels
from .indexing import (
    collision_free_mask,
    insert_player_digit,
    pairwise_distinct,
    unpack_joint,
)
from .jointvalue import JointValue, expected_initial_value, terminal_value
from .occupancy import (
    EpsilonSchedule,
    epsilon_at,
    forward_propagate,
    opponent_occupancy,
    two_step_occupancy,
)


@dataclass(frozen=True)
class BestResponseResult:
    """Output of :func:`best_response`.

    ``projected_values[t, s]`` is the occupancy-projected value of local
    state s at time t; ``joint_value0`` is the final t = 0 joint-state
    buffer under (returned policy, opponents); ``achieved_value`` is its
    expectation under the initial laws.  ``dead_rows[t, s]`` marks
    decision rows where every action scored exactly zero (the returned
    action there is 0 by convention).
    """

    policy: Policy
    projected_values: np.ndarray
    joint_value0: JointValue
    achieved_value: float
    dead_rows: np.ndarray


def greedy_action(action_values) -> int:
    """Smallest index attaining the maximum."""
    return int(np.argmax(np.asarray(action_values)))


def stochastic_obstacle_term(
    opponent_occ: np.ndarray, n_opponents: int, state_count: int, s_i: int
) -> float:
    """No-collision likelihood at one time step, conditioned on the player
    sitting at ``s_i``: total opponent occupancy over joint states that are
    internally distinct and avoid ``s_i``.  Exact for point-mass occupancies
    (recovers the product of indicators)."""
    occ = np.asarray(opponent_occ, dtype=np.float64)
    if n_opponents == 0:
        return float(occ.sum())
    digits = unpack_joint(np.arange(occ.shape[0]), state_count, n_opponents)
    ok = pairwise_distinct(digits) & np.all(digits != s_i, axis=1)
    return float(occ[ok].sum())


def _validate_opponents(game: GameSpec, i: int, opponent_policies) -> dict:
    if not 0 <= i < game.n_players:
        raise ConfigurationError(f"player index {i} outside [0, {game.n_players})")
    if len(opponent_policies) != game.n_players:
        raise ConfigurationError(
            f"expected a length-{game.n_players} policy sequence (entry {i} ignored), "
            f"got length {len(opponent_policies)}"
        )
    out = {}
    for j in game.opponents(i):
        pol = opponent_policies[j]
        if pol is None:
            raise ConfigurationError(f"missing policy for opponent {j}")
        if pol.owner != j:
            raise ConfigurationError(f"policy at slot {j} is owned by {pol.owner}")
        mdp = game.players[j]
        if (
            pol.horizon != game.horizon
            or pol.state_count != mdp.state_count
            or pol.action_count != mdp.action_count
        ):
            raise ConfigurationError(f"opponent {j} policy does not fit its MDP")
        out[j] = pol
    return out


def _project_on_local(values_flat, occ, player, state_count, n_players):
    """sum_{s_-i} occ[s_-i] * values[(s_i, s_-i)] for every s_i."""
    rest = np.arange(state_count ** (n_players - 1), dtype=np.int64)
    own = np.arange(state_count, dtype=np.int64)
    joint = insert_player_digit(rest[None, :], own[:, None], player, state_count, n_players)
    return values_flat[joint] @ occ


def best_response(
    game: GameSpec,
    i: int,
    opponent_policies: Sequence,
    schedule: EpsilonSchedule | None = None,
) -> BestResponseResult:
    """Compute player i's deterministic greedy response to fixed opponents.

    With no truncation (``schedule`` None or the zero schedule) the returned
    policy maximizes the shared objective over player i's policy set whenever
    no collision can occur before a decision time (in particular single-player
    games, point-mass opponents, and two-step games with distinct starts);
    ``achieved_value`` then equals the exact objective of the returned joint
    policy.
    """
    opponents = game.opponents(i)
    policies = _validate_opponents(game, i, opponent_policies)
    n, s_count, horizon = game.n_players, game.state_count, game.horizon
    own = game.players[i]
    a_count = own.action_count

    occ_tables = [forward_propagate(game.players[j], policies[j]) for j in opponents]
    opp_kernels = [policy_kernels(game.players[j], policies[j]) for j in opponents]
    mask = collision_free_mask(s_count, n)

    v = terminal_value(game).values
    projected = np.empty((horizon + 1, s_count))
    projected[horizon] = _project_on_local(
        v, opponent_occupancy(occ_tables, horizon), i, s_count, n
    )
    greedy = np.empty((horizon, s_count), dtype=np.int64)
    dead = np.zeros((horizon, s_count), dtype=bool)

    for t in range(horizon - 1, -1, -1):
        occ_t = opponent_occupancy(occ_tables, t)
        kernels_t = [k[t] for k in opp_kernels]
        table = two_step_occupancy(kernels_t, occ_t, schedule, t)
        src_digits = unpack_joint(table.src, s_count, n - 1)
        internal_ok = pairwise_distinct(src_digits)
        action_values = br_action_values(
            v, own.kernel, i, n, src_digits, internal_ok, table.dst, table.mass
        )
        greedy[t] = np.argmax(action_values, axis=1)
        projected[t] = action_values[np.arange(s_count), greedy[t]]
        dead[t] = projected[t] == 0.0

        greedy_kernel = own.kernel[np.arange(s_count), greedy[t], :]
        full_kernels = []
        pos = 0
        for j in range(n):
            if j == i:
                full_kernels.append(greedy_kernel)
            else:
                full_kernels.append(kernels_t[pos])
                pos += 1
        v = masked_value_contract(v, full_kernels, mask)

        eps = 0.0 if schedule is None else epsilon_at(schedule, t)
        if eps > 0.0:
            killed = np.nonzero(occ_t <= eps)[0].astype(np.int64)
            if killed.size:
                joint = insert_player_digit(
                    killed[None, :],
                    np.arange(s_count, dtype=np.int64)[:, None],
                    i,
                    s_count,
                    n,
                )
                v[joint.reshape(-1)] = 0.0

    policy = Policy.deterministic(i, greedy, a_count)
    achieved = expected_initial_value(game, v)
    return BestResponseResult(policy, projected, JointValue(0, v), achieved, dead)
