"""Round-robin iterative best response.

Players respond in fixed order (player ``k mod N`` moves at iteration k);
the run stops once a full round of N responses changes the tracked objective
by at most the convergence tolerance, or at the iteration cap (flagged, not
fatal).  The tracked objective is the responder's achieved value, which is
the exact objective of the current joint policy when no truncation schedule
is active.
"""

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bestresponse import best_response
from .errors import ConfigurationError
from .game import GameSpec, PlayerMdp, Policy
from .jointvalue import potential_value
from .occupancy import EpsilonSchedule


@dataclass(frozen=True)
class IbrConfig:
    max_iterations: int = 100
    convergence_tol: float = 1e-9
    schedule: EpsilonSchedule = field(default_factory=EpsilonSchedule.zero)
    seed: int | None = None
    order: tuple | None = None

    def __post_init__(self):
        if self.convergence_tol < 0:
            raise ConfigurationError("convergence_tol must be >= 0")
        if self.max_iterations < 1:
            raise ConfigurationError("max_iterations must be positive")


@dataclass(frozen=True)
class IbrStep:
    iteration: int
    player: int
    potential: float
    seconds: float


@dataclass
class IbrTrace:
    initial_potential: float
    steps: list
    converged: bool

    @property
    def potentials(self) -> np.ndarray:
        return np.array([s.potential for s in self.steps])

    @property
    def n_iterations(self) -> int:
        return len(self.steps)


def shortest_path_policy(mdp: PlayerMdp, horizon: int) -> Policy:
    """Single-player reach-maximizing policy (opponents ignored).

    Backward induction on the reach probability with greedy lowest-index
    tie-breaks; deterministic by construction.
    """
    values = mdp.target_mask.copy()
    actions = np.empty((horizon, mdp.state_count), dtype=np.int64)
    for t in range(horizon - 1, -1, -1):
        q = mdp.kernel @ values
        actions[t] = np.argmax(q, axis=1)
        values = q[np.arange(mdp.state_count), actions[t]]
    return Policy.deterministic(0, actions, mdp.action_count)


def default_initial_policies(game: GameSpec) -> list:
    """Per-player shortest-path policies (the standard warm start)."""
    out = []
    for i, mdp in enumerate(game.players):
        pol = shortest_path_policy(mdp, game.horizon)
        out.append(Policy(i, pol.table))
    return out


def run_ibr(
    game: GameSpec,
    config: IbrConfig = IbrConfig(),
    initial_policies: Sequence[Policy] | None = None,
    observer: Callable | None = None,
):
    """Run iterative best response; returns (final policies, trace).

    ``observer(iteration, player, policies, step)`` is called after every
    response with the current joint policy snapshot.  Non-convergence within
    ``max_iterations`` is reported through ``trace.converged``, never raised.
    """
    n = game.n_players
    if config.max_iterations < n:
        raise ConfigurationError(
            f"max_iterations = {config.max_iterations} is below the player count {n}"
        )
    order = tuple(config.order) if config.order is not None else tuple(range(n))
    if sorted(order) != list(range(n)):
        raise ConfigurationError(f"order {order} is not a permutation of players")

    if initial_policies is None:
        policies = default_initial_policies(game)
    else:
        if len(initial_policies) != n:
            raise ConfigurationError("need one initial policy per player")
        policies = list(initial_policies)

    last_potential = potential_value(game, policies)
    trace = IbrTrace(last_potential, [], False)
    round_deltas = []
    for k in range(config.max_iterations):
        player = order[k % n]
        start = time.perf_counter()
        result = best_response(game, player, policies, config.schedule)
        elapsed = time.perf_counter() - start
        policies[player] = result.policy
        step = IbrStep(k, player, result.achieved_value, elapsed)
        trace.steps.append(step)
        round_deltas.append(abs(result.achieved_value - last_potential))
        last_potential = result.achieved_value
        if observer is not None:
            observer(k, player, list(policies), step)
        if k % n == n - 1:
            if max(round_deltas) <= config.convergence_tol:
                trace.converged = True
                break
            round_deltas = []
    return policies, trace
