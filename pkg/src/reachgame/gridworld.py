"""Grid-world scenario construction.

States index row-major (``state = row * cols + col``); the four actions are
0 = up, 1 = down, 2 = left, 3 = right.  An action reaches its intended
neighbor with the success probability and otherwise moves to a uniformly
random neighbor: the residual mass spreads (1 - q)/4 per direction, with
directions leaving the grid folded onto the current cell.  Intended moves
off the grid keep the player in place.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .game import GameSpec, PlayerMdp

ACTION_NAMES = ("up", "down", "left", "right")
_DELTAS = ((-1, 0), (1, 0), (0, -1), (0, 1))

P_CONVENTIONS = ("success", "failure")


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int
    players: int
    horizon: int
    stochasticity: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigurationError("grid dimensions must be positive")
        if self.players < 1:
            raise ConfigurationError("need at least one player")
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if not 0.0 <= self.stochasticity <= 1.0:
            raise ConfigurationError(
                f"stochasticity must lie in [0, 1], got {self.stochasticity}"
            )
        if self.rows * self.cols < 2 * self.players:
            raise ConfigurationError(
                f"{self.rows}x{self.cols} grid cannot host {self.players} distinct "
                "starts and targets"
            )
        if self.players > self.rows:
            raise ConfigurationError(
                f"{self.players} players need {self.players} distinct left-column "
                f"rows, grid has {self.rows}"
            )

    @property
    def state_count(self) -> int:
        return self.rows * self.cols


def state_index(spec: GridSpec, row: int, col: int) -> int:
    return row * spec.cols + col


def success_probability(stochasticity: float, p_convention: str) -> float:
    """Map the scenario's p to the probability the intended move succeeds."""
    if p_convention == "success":
        return stochasticity
    if p_convention == "failure":
        return 1.0 - stochasticity
    raise ConfigurationError(
        f"p_convention must be one of {P_CONVENTIONS}, got {p_convention!r}"
    )


def build_grid_mdp(spec: GridSpec, p_convention: str = "success") -> np.ndarray:
    """Shared (S, 4, S) transition kernel for the grid; initial law and
    target set are filled per player by the scenario builder."""
    q = success_probability(spec.stochasticity, p_convention)
    s_count = spec.state_count
    kernel = np.zeros((s_count, 4, s_count))
    for r in range(spec.rows):
        for c in range(spec.cols):
            s = state_index(spec, r, c)
            dests = []
            for dr, dc in _DELTAS:
                rr, cc = r + dr, c + dc
                if 0 <= rr < spec.rows and 0 <= cc < spec.cols:
                    dests.append(state_index(spec, rr, cc))
                else:
                    dests.append(s)
            for a in range(4):
                kernel[s, a, dests[a]] += q
                for d in dests:
                    kernel[s, a, d] += (1.0 - q) / 4.0
    return kernel


def random_scenario(spec: GridSpec, p_convention: str = "success") -> GameSpec:
    """Seeded scenario: distinct point-mass starts on the left column,
    distinct single-cell targets on the right column, and the holder of the
    top-left start assigned the bottom-right target (the top-left start is
    always placed so the crossing pressure exists on every seed)."""
    rng = np.random.default_rng(spec.seed)
    kernel = build_grid_mdp(spec, p_convention)
    n = spec.players

    start_rows = rng.permutation(spec.rows)[:n]
    if 0 not in start_rows:
        start_rows = start_rows.copy()
        start_rows[0] = 0

    other_target_rows = rng.permutation(np.arange(spec.rows - 1))[: n - 1]
    target_rows = np.empty(n, dtype=np.int64)
    pos = 0
    for p in range(n):
        if start_rows[p] == 0:
            target_rows[p] = spec.rows - 1
        else:
            target_rows[p] = other_target_rows[pos]
            pos += 1

    players = []
    for p in range(n):
        init = np.zeros(spec.state_count)
        init[state_index(spec, int(start_rows[p]), 0)] = 1.0
        target = state_index(spec, int(target_rows[p]), spec.cols - 1)
        players.append(PlayerMdp(kernel, init, [target]))
    return GameSpec(tuple(players), spec.horizon)
