"""Game data model and elementary probabilistic quantities.

Conventions used throughout the package:

* states, actions and times are dense integer indices;
* a transition kernel is a (S, A, S) array, ``kernel[s, a, s']`` being the
  probability of moving to ``s'`` when playing ``a`` at ``s``;
* a policy table is a (T, S, A) array of per-(time, state) action
  distributions;
* a trajectory is a length-(T+1) integer array of visited states;
* the kernel-under-policy of one player is a (T, S, S) array of row-stochastic
  per-time transition matrices (see :func:`policy_kernel`).

All domain types are immutable after construction (arrays are frozen), so
they are safe to share across workers.  Numeric invariants are *reported* by
:func:`validate_game`, not enforced at construction; construction only
rejects structural problems such as shape mismatches.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

PROB_ATOL = 1e-12


def _frozen_f64(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise ConfigurationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PlayerMdp:
    """One player's MDP on the shared state space.

    Parameters
    ----------
    kernel : (S, A, S) array
        Transition probabilities ``kernel[s, a, s']``.
    initial_dist : (S,) array
        Distribution of the player's initial state.
    target_set : iterable of int
        States the player must occupy at the final time.
    """

    kernel: np.ndarray
    initial_dist: np.ndarray
    target_set: np.ndarray
    target_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kernel = _frozen_f64(self.kernel, "kernel", 3)
        init = _frozen_f64(self.initial_dist, "initial_dist", 1)
        targets = np.unique(np.asarray(self.target_set, dtype=np.int64))
        targets.setflags(write=False)
        s = kernel.shape[0]
        if kernel.shape[2] != s:
            raise ConfigurationError(
                f"kernel source/destination sizes differ: {kernel.shape[0]} vs {kernel.shape[2]}"
            )
        if init.shape[0] != s:
            raise ConfigurationError(
                f"initial_dist has {init.shape[0]} states, kernel has {s}"
            )
        mask = np.zeros(s, dtype=np.float64)
        valid = targets[(targets >= 0) & (targets < s)]
        mask[valid] = 1.0
        mask.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "initial_dist", init)
        object.__setattr__(self, "target_set", targets)
        object.__setattr__(self, "target_mask", mask)

    @property
    def state_count(self) -> int:
        return self.kernel.shape[0]

    @property
    def action_count(self) -> int:
        return self.kernel.shape[1]


@dataclass(frozen=True)
class GameSpec:
    """N player MDPs sharing one state space plus a common horizon.

    ``horizon`` counts transition steps; trajectories have ``horizon + 1``
    states.
    """

    players: tuple
    horizon: int

    def __post_init__(self):
        players = tuple(self.players)
        if not players:
            raise ConfigurationError("a game needs at least one player")
        s = players[0].state_count
        for i, p in enumerate(players):
            if p.state_count != s:
                raise ConfigurationError(
                    f"player {i} has {p.state_count} states, player 0 has {s}"
                )
        if self.horizon < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {self.horizon}")
        object.__setattr__(self, "players", players)

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def state_count(self) -> int:
        return self.players[0].state_count

    def opponents(self, i: int) -> tuple:
        return tuple(j for j in range(self.n_players) if j != i)


@dataclass(frozen=True)
class Policy:
    """Time-varying local-feedback action rule for one player.

    ``table[t, s]`` is the action distribution played at state ``s``, time
    ``t``.  A policy is deterministic iff every row is a unit vector.
    """

    owner: int
    table: np.ndarray

    def __post_init__(self):
        table = _frozen_f64(self.table, "policy table", 3)
        object.__setattr__(self, "table", table)

    @property
    def horizon(self) -> int:
        return self.table.shape[0]

    @property
    def state_count(self) -> int:
        return self.table.shape[1]

    @property
    def action_count(self) -> int:
        return self.table.shape[2]

    def is_deterministic(self, atol: float = PROB_ATOL) -> bool:
        return bool(np.all(np.abs(self.table.max(axis=2) - 1.0) <= atol))

    @staticmethod
    def deterministic(owner: int, actions: np.ndarray, action_count: int) -> "Policy":
        """Build a one-hot policy from an (T, S) action-index table."""
        actions = np.asarray(actions, dtype=np.int64)
        t, s = actions.shape
        table = np.zeros((t, s, action_count))
        tt, ss = np.meshgrid(np.arange(t), np.arange(s), indexing="ij")
        table[tt, ss, actions] = 1.0
        return Policy(owner, table)

    @staticmethod
    def uniform(owner: int, horizon: int, state_count: int, action_count: int) -> "Policy":
        table = np.full((horizon, state_count, action_count), 1.0 / action_count)
        return Policy(owner, table)


def _check_policy_compat(mdp: PlayerMdp, policy: Policy):
    if policy.state_count != mdp.state_count or policy.action_count != mdp.action_count:
        raise ConfigurationError(
            f"policy shaped (T,{policy.state_count},{policy.action_count}) does not fit an "
            f"MDP with {mdp.state_count} states and {mdp.action_count} actions"
        )


def policy_kernel(mdp: PlayerMdp, policy: Policy, t: int) -> np.ndarray:
    """Transition matrix at time t under the policy.

    Entry (s, s') is sum_a kernel[s, a, s'] * policy[t, s, a]; every row is a
    distribution whenever the inputs are.
    """
    _check_policy_compat(mdp, policy)
    if not 0 <= t < policy.horizon:
        raise ConfigurationError(f"time {t} outside [0, {policy.horizon})")
    return np.einsum("sa,sar->sr", policy.table[t], mdp.kernel)


def policy_kernels(mdp: PlayerMdp, policy: Policy) -> np.ndarray:
    """All per-time transition matrices at once; shape (T, S, S)."""
    _check_policy_compat(mdp, policy)
    return np.einsum("tsa,sar->tsr", policy.table, mdp.kernel)


def trajectory_probability(mdp: PlayerMdp, policy: Policy, traj) -> float:
    """Probability of one state trajectory under initial_dist and the policy."""
    states = np.asarray(traj, dtype=np.int64)
    if states.shape != (policy.horizon + 1,):
        raise ConfigurationError(
            f"trajectory has {states.shape[0]} states, expected {policy.horizon + 1}"
        )
    kernels = policy_kernels(mdp, policy)
    p = float(mdp.initial_dist[states[0]])
    for t in range(policy.horizon):
        p *= kernels[t, states[t], states[t + 1]]
    return p


def reach_indicator(mdp: PlayerMdp, s: int) -> int:
    """1 iff state s lies in the player's target set."""
    return int(mdp.target_mask[s])


def avoid_indicator(i: int, j: int, s_i: int, s_j: int) -> int:
    """1 for the self pair i == j, else 1 iff the two states differ."""
    if i == j:
        return 1
    return int(s_i != s_j)


def joint_reach_avoid(trajs: Sequence, game: GameSpec) -> int:
    """1 iff every player ends inside its target and no two distinct players
    ever share a state.  Pairs are scanned unordered (i < j), which equals the
    ordered-pair product for {0,1} indicators."""
    states = np.asarray(trajs, dtype=np.int64)
    n = game.n_players
    if states.shape != (n, game.horizon + 1):
        raise ConfigurationError(
            f"expected {n} trajectories of length {game.horizon + 1}, got shape {states.shape}"
        )
    for i, mdp in enumerate(game.players):
        if not mdp.target_mask[states[i, -1]]:
            return 0
    for a in range(n):
        for b in range(a + 1, n):
            if np.any(states[a] == states[b]):
                return 0
    return 1


@dataclass(frozen=True)
class Violation:
    location: str
    message: str


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"{v.location}: {v.message}" for v in self.violations)


def validate_game(game: GameSpec, atol: float = PROB_ATOL) -> ValidationReport:
    """Collect all invariant violations; never raises.

    Checks every kernel row and initial distribution for normalization and
    nonnegativity, and every target set for being nonempty and in range.
    """
    out = []
    for i, mdp in enumerate(game.players):
        s_count = mdp.state_count
        for s in range(s_count):
            for a in range(mdp.action_count):
                row = mdp.kernel[s, a]
                total = row.sum()
                if abs(total - 1.0) > atol:
                    out.append(
                        Violation(
                            f"player {i}, state {s}, action {a}",
                            f"kernel row sums to {total:.12g}",
                        )
                    )
                if (row < 0).any():
                    out.append(
                        Violation(
                            f"player {i}, state {s}, action {a}",
                            "kernel row has negative entries",
                        )
                    )
        total = mdp.initial_dist.sum()
        if abs(total - 1.0) > atol:
            out.append(Violation(f"player {i}", f"initial_dist sums to {total:.12g}"))
        if (mdp.initial_dist < 0).any():
            out.append(Violation(f"player {i}", "initial_dist has negative entries"))
        if mdp.target_set.size == 0:
            out.append(Violation(f"player {i}", "target set is empty"))
        elif (mdp.target_set < 0).any() or (mdp.target_set >= s_count).any():
            out.append(Violation(f"player {i}", "target set has out-of-range states"))
    return ValidationReport(out)
