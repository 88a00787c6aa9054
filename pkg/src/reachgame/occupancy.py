"""Occupancy measures: forward propagation, opponent products, and the
sparsified two-time-step table used by the best-response sweep."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .game import PlayerMdp, Policy, policy_kernels
from .indexing import pack_joint, unpack_joint

OCC_ATOL = 1e-10


@dataclass(frozen=True)
class OccupancyTable:
    """Per-time state distribution of one player; ``table[t, s]`` is the
    probability of occupying s at time t.  Shape (T+1, S)."""

    owner: int
    table: np.ndarray

    def __post_init__(self):
        table = np.array(self.table, dtype=np.float64, copy=True)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def horizon(self) -> int:
        return self.table.shape[0] - 1

    @property
    def state_count(self) -> int:
        return self.table.shape[1]


@dataclass(frozen=True)
class EpsilonSchedule:
    """Truncation threshold schedule eps(t) = base ** (slope * t + offset)."""

    base: float = 1e-2
    slope: float = 0.75
    offset: float = 3.0

    @staticmethod
    def paper_default() -> "EpsilonSchedule":
        return EpsilonSchedule(1e-2, 0.75, 3.0)

    @staticmethod
    def zero() -> "EpsilonSchedule":
        """No truncation: base 0 gives eps(t) = 0 for every t."""
        return EpsilonSchedule(0.0, 0.0, 1.0)


def epsilon_at(schedule: EpsilonSchedule, t: int) -> float:
    """Evaluate the schedule at time step t.

    Raises a configuration error when the parameters put eps(t) outside
    [0, 1), since a threshold of 1 would truncate every state.
    """
    if t < 0:
        raise ConfigurationError(f"time step must be nonnegative, got {t}")
    if schedule.base < 0:
        raise ConfigurationError(f"epsilon base must be >= 0, got {schedule.base}")
    exponent = schedule.slope * t + schedule.offset
    if schedule.base == 0.0:
        if exponent <= 0:
            raise ConfigurationError("zero base requires a positive exponent")
        return 0.0
    eps = float(schedule.base**exponent)
    if not 0.0 <= eps < 1.0:
        raise ConfigurationError(
            f"epsilon schedule yields eps({t}) = {eps:.6g}, outside [0, 1)"
        )
    return eps


def forward_propagate(mdp: PlayerMdp, policy: Policy) -> OccupancyTable:
    """Push the initial distribution through the policy kernels.

    Row t+1 is ``y_t.T @ row_t``; every row stays a distribution up to
    roundoff whenever the inputs are valid.
    """
    kernels = policy_kernels(mdp, policy)
    horizon = policy.horizon
    table = np.empty((horizon + 1, mdp.state_count))
    table[0] = mdp.initial_dist
    for t in range(horizon):
        table[t + 1] = kernels[t].T @ table[t]
    return OccupancyTable(policy.owner, table)


def opponent_occupancy(tables: Sequence[OccupancyTable], t: int) -> np.ndarray:
    """Product measure over the given players' states at time t.

    Returns a flat array over packed joint states, packed row-major in the
    order the tables are given.  With no opponents this is the single-entry
    array [1.0] (the empty product).
    """
    if tables:
        s_count = tables[0].state_count
        for tab in tables:
            if tab.state_count != s_count or tab.horizon != tables[0].horizon:
                raise ConfigurationError("occupancy tables disagree on S or T")
    out = np.ones(1)
    for tab in tables:
        out = (out[:, None] * tab.table[t][None, :]).reshape(-1)
    return out


@dataclass(frozen=True)
class TwoStepOpponentOccupancy:
    """Sparse joint law of opponent states at t and t+1.

    Parallel arrays: entry k says the opponents sit at packed joint state
    ``src[k]`` at time t and move to ``dst[k]`` at t+1 with probability
    ``mass[k]``.  Total mass is 1 up to roundoff when no truncation was
    applied, and strictly smaller otherwise; zero-probability entries are
    never stored.
    """

    src: np.ndarray
    dst: np.ndarray
    mass: np.ndarray
    n_opponents: int
    state_count: int

    def total_mass(self) -> float:
        return float(self.mass.sum())

    def __len__(self) -> int:
        return self.mass.shape[0]

    def to_dict(self) -> dict:
        return {
            (int(s), int(d)): float(m)
            for s, d, m in zip(self.src, self.dst, self.mass)
        }

    def marginal_src(self) -> np.ndarray:
        out = np.zeros(self.state_count**self.n_opponents)
        np.add.at(out, self.src, self.mass)
        return out

    def marginal_dst(self) -> np.ndarray:
        out = np.zeros(self.state_count**self.n_opponents)
        np.add.at(out, self.dst, self.mass)
        return out


def _csr(matrix: np.ndarray):
    rows, cols = np.nonzero(matrix)
    indptr = np.zeros(matrix.shape[0] + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, cols.astype(np.int64), matrix[rows, cols]


def two_step_occupancy(
    kernels_t: Sequence[np.ndarray],
    occupancy_t: np.ndarray,
    schedule: EpsilonSchedule | None = None,
    t: int = 0,
    *,
    epsilon: float | None = None,
) -> TwoStepOpponentOccupancy:
    """Build the (optionally truncated) two-time-step opponent table.

    Joint source states whose product occupancy is <= eps(t) are dropped
    entirely; surviving sources fan out to every destination with a positive
    kernel product.  Nothing is renormalized, so the table under-approximates
    the exact joint law whenever truncation removed mass.

    Parameters
    ----------
    kernels_t : one (S, S) matrix per opponent, in increasing player order
    occupancy_t : flat product occupancy over packed opponent states at t
    schedule, t : evaluated via :func:`epsilon_at` when ``epsilon`` is None
    epsilon : explicit threshold override (accepts the boundary value 1.0)
    """
    if epsilon is None:
        epsilon = 0.0 if schedule is None else epsilon_at(schedule, t)
    m = len(kernels_t)
    s_count = kernels_t[0].shape[0] if m else 1
    occupancy_t = np.asarray(occupancy_t, dtype=np.float64)
    kept = np.nonzero(occupancy_t > epsilon)[0].astype(np.int64)
    if kept.size == 0:
        empty_i, empty_f = np.empty(0, dtype=np.int64), np.empty(0)
        return TwoStepOpponentOccupancy(empty_i, empty_i.copy(), empty_f, m, s_count)

    digits = unpack_joint(kept, s_count, m) if m else np.empty((kept.size, 0), np.int64)
    origin = np.arange(kept.size, dtype=np.int64)
    dst = np.zeros(kept.size, dtype=np.int64)
    mass = occupancy_t[kept].copy()
    for j in range(m):
        indptr, indices, data = _csr(np.asarray(kernels_t[j], dtype=np.float64))
        row_states = digits[origin, j]
        counts = (indptr[row_states + 1] - indptr[row_states]).astype(np.int64)
        rep = np.repeat(np.arange(origin.size, dtype=np.int64), counts)
        within = np.arange(counts.sum(), dtype=np.int64) - np.repeat(
            np.concatenate(([0], np.cumsum(counts)[:-1])), counts
        )
        flat = indptr[row_states][rep] + within
        dst = dst[rep] * s_count + indices[flat]
        mass = mass[rep] * data[flat]
        origin = origin[rep]
    positive = mass > 0
    return TwoStepOpponentOccupancy(
        kept[origin[positive]], dst[positive], mass[positive], m, s_count
    )


__all__ = [
    "OccupancyTable",
    "EpsilonSchedule",
    "TwoStepOpponentOccupancy",
    "epsilon_at",
    "forward_propagate",
    "opponent_occupancy",
    "two_step_occupancy",
]
