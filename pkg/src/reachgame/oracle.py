"""Brute-force ground truth: trajectory-enumeration objective, exact joint
dynamic programming with global feedback, and exhaustive Nash verification.

Everything here is exact up to floating-point summation; enumeration order is
fixed (lexicographic over packed indices) so results are reproducible.  Size
guards are hard errors -- these routines never approximate.
"""

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import SizeGuardError
from .game import GameSpec, PlayerMdp, Policy, policy_kernels
from .indexing import collision_free_mask, unpack_joint
from .jointvalue import expected_initial_value, potential_value, terminal_value

ENUMERATION_GUARD = 10**7
GLOBAL_DP_GUARD = 10**7
DEVIATION_GUARD = 10**5

_CHUNK = 1 << 18


def _player_suffixes(mdp, kernels, start, t_from, horizon):
    """All state paths of one player over [t_from, horizon] with their
    probabilities; ``start`` fixes the first state (None = draw from the
    initial law, prepending time 0)."""
    length = horizon - t_from + 1
    if start is None:
        m = mdp.state_count**length
        paths = unpack_joint(np.arange(m), mdp.state_count, length)
        probs = mdp.initial_dist[paths[:, 0]].copy()
        base_t = 0
    else:
        m = mdp.state_count ** (length - 1)
        tails = unpack_joint(np.arange(m), mdp.state_count, length - 1)
        paths = np.concatenate(
            [np.full((m, 1), start, dtype=np.int64), tails], axis=1
        )
        probs = np.ones(m)
        base_t = t_from
    for step in range(length - 1):
        probs *= kernels[base_t + step, paths[:, step], paths[:, step + 1]]
    return paths, probs


def _joint_indicator_sum(per_player_paths, per_player_weights):
    """sum over the cross product of per-player paths of
    prod_j weight_j * [paths pairwise distinct at every time]."""
    n = len(per_player_paths)
    sizes = [p.shape[0] for p in per_player_paths]
    total = int(np.prod([np.int64(s) for s in sizes]))
    acc = 0.0
    for lo in range(0, total, _CHUNK):
        combo = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        weight = np.ones(combo.shape[0])
        chosen = []
        rest = combo
        for j in range(n - 1, -1, -1):
            idx = rest % sizes[j]
            rest = rest // sizes[j]
            chosen.append(per_player_paths[j][idx])
            weight *= per_player_weights[j][idx]
        chosen.reverse()
        ok = np.ones(combo.shape[0], dtype=bool)
        for a in range(n):
            for b in range(a + 1, n):
                ok &= ~np.any(chosen[a] == chosen[b], axis=1)
        acc += float(weight[ok].sum())
    return acc


def enumerate_F(game: GameSpec, joint_policy: Sequence[Policy]) -> float:
    """Objective by full joint-trajectory enumeration (no value recursion).

    Sums reach-avoid indicator times initial-law and kernel-product weights
    over every joint trajectory, lexicographically.
    """
    n, s_count, horizon = game.n_players, game.state_count, game.horizon
    total = s_count ** (n * (horizon + 1))
    if total > ENUMERATION_GUARD:
        raise SizeGuardError(
            f"S^(N(T+1)) = {total} exceeds the enumeration guard {ENUMERATION_GUARD}"
        )
    paths, weights = [], []
    for j in range(n):
        kernels = policy_kernels(game.players[j], joint_policy[j])
        pth, prb = _player_suffixes(game.players[j], kernels, None, 0, horizon)
        paths.append(pth)
        weights.append(prb * game.players[j].target_mask[pth[:, -1]])
    return _joint_indicator_sum(paths, weights)


def enumerate_tail_value(
    game: GameSpec, joint_policy: Sequence[Policy], t: int, joint_state
) -> float:
    """Conditional expectation of the tail reach-avoid indicator given the
    joint state at time t, by suffix-trajectory enumeration."""
    n, s_count, horizon = game.n_players, game.state_count, game.horizon
    total = s_count ** (n * (horizon - t))
    if total > ENUMERATION_GUARD:
        raise SizeGuardError(
            f"S^(N(T-t)) = {total} exceeds the enumeration guard {ENUMERATION_GUARD}"
        )
    joint_state = np.asarray(joint_state, dtype=np.int64)
    paths, weights = [], []
    for j in range(n):
        kernels = policy_kernels(game.players[j], joint_policy[j])
        pth, prb = _player_suffixes(
            game.players[j], kernels, int(joint_state[j]), t, horizon
        )
        paths.append(pth)
        weights.append(prb * game.players[j].target_mask[pth[:, -1]])
    return _joint_indicator_sum(paths, weights)


@dataclass(frozen=True)
class GlobalPolicy:
    """Deterministic joint-action rule with global state feedback:
    ``actions[t, packed joint state]`` is a packed joint action (player 0
    most significant)."""

    actions: np.ndarray
    state_count: int
    action_counts: tuple

    def joint_action(self, t: int, packed_state: int) -> tuple:
        packed = int(self.actions[t, packed_state])
        out = []
        for a in reversed(self.action_counts):
            out.append(packed % a)
            packed //= a
        return tuple(reversed(out))


def global_dp(game: GameSpec):
    """Exact DP on the joint state space over joint actions.

    Returns (GlobalPolicy, optimal objective).  Ties go to the lowest packed
    joint action.  This optimum upper-bounds every local-feedback joint
    policy's objective.
    """
    n, s_count, horizon = game.n_players, game.state_count, game.horizon
    a_counts = tuple(p.action_count for p in game.players)
    joint_states = s_count**n
    joint_actions = int(np.prod(a_counts))
    if joint_states * joint_actions > GLOBAL_DP_GUARD:
        raise SizeGuardError(
            f"S^N * prod(A_i) = {joint_states * joint_actions} exceeds the "
            f"global DP guard {GLOBAL_DP_GUARD}"
        )
    mask = collision_free_mask(s_count, n)
    values = terminal_value(game).values
    policy = np.zeros((horizon, joint_states), dtype=np.int64)
    shape = (s_count,) * n
    for t in range(horizon - 1, -1, -1):
        best = np.full(joint_states, -1.0)
        best_action = np.zeros(joint_states, dtype=np.int64)
        for packed_a, combo in enumerate(itertools.product(*[range(a) for a in a_counts])):
            w = values.reshape(shape)
            for j in range(n):
                w = np.moveaxis(
                    np.tensordot(game.players[j].kernel[:, combo[j], :], w, axes=([1], [j])),
                    0,
                    j,
                )
            w = w.reshape(-1)
            better = w > best
            best[better] = w[better]
            best_action[better] = packed_a
        values = mask * best
        policy[t] = best_action
    return GlobalPolicy(policy, s_count, a_counts), expected_initial_value(game, values)


@dataclass(frozen=True)
class ImprovingDeviation:
    player: int
    actions: np.ndarray
    value: float
    gain: float


@dataclass
class NashReport:
    base_value: float
    improving: list
    deviations_checked: list

    @property
    def ok(self) -> bool:
        return not self.improving


def _reachable_action_tables(mdp: PlayerMdp, horizon: int, emit_tables: bool = True):
    """Yield every deterministic (T, S) action table that differs on states
    reachable under itself; unreachable rows are pinned to action 0.

    Policies agreeing on their reachable supports induce identical state
    laws, so this enumeration covers every achievable objective value while
    staying exponential only in the reachable layer sizes.  Deterministic
    deviations suffice: the objective is multilinear in the per-row action
    distributions, hence maximized at a vertex of each row simplex.

    With ``emit_tables`` False only None is yielded per leaf (cheap counting
    pass).
    """
    supports = [
        [frozenset(np.nonzero(mdp.kernel[s, a] > 0)[0].tolist()) for a in range(mdp.action_count)]
        for s in range(mdp.state_count)
    ]
    table = np.zeros((horizon, mdp.state_count), dtype=np.int64)

    def recurse(t, reachable):
        if t == horizon:
            yield table.copy() if emit_tables else None
            return
        states = sorted(reachable)
        for assignment in itertools.product(range(mdp.action_count), repeat=len(states)):
            nxt = set()
            for s, a in zip(states, assignment):
                table[t, s] = a
                nxt.update(supports[s][a])
            yield from recurse(t + 1, nxt)
            for s in states:
                table[t, s] = 0

    yield from recurse(0, set(np.nonzero(mdp.initial_dist > 0)[0].tolist()))


def count_effective_deviations(mdp: PlayerMdp, horizon: int, guard: int | None = None) -> int:
    """Number of deterministic policies distinct on their reachable supports;
    raises once the count exceeds ``guard`` (before any policy is evaluated)."""
    count = 0
    for _ in _reachable_action_tables(mdp, horizon, emit_tables=False):
        count += 1
        if guard is not None and count > guard:
            raise SizeGuardError(
                f"effective deterministic deviations exceed the guard {guard}"
            )
    return count


def verify_nash(
    game: GameSpec, joint_policy: Sequence[Policy], tol: float = 1e-10
) -> NashReport:
    """Exhaustively search unilateral deterministic deviations.

    An empty report certifies a tol-approximate pure Nash equilibrium over
    deterministic deviations, which by multilinearity certifies it over all
    local policies.
    """
    for i in range(game.n_players):
        count_effective_deviations(game.players[i], game.horizon, DEVIATION_GUARD)
    base = potential_value(game, joint_policy)
    improving = []
    checked = []
    for i in range(game.n_players):
        n_checked = 0
        for actions in _reachable_action_tables(game.players[i], game.horizon):
            candidate = list(joint_policy)
            candidate[i] = Policy.deterministic(
                i, actions, game.players[i].action_count
            )
            value = potential_value(game, candidate)
            n_checked += 1
            if value > base + tol:
                improving.append(ImprovingDeviation(i, actions, value, value - base))
        checked.append(n_checked)
    return NashReport(base, improving, checked)
