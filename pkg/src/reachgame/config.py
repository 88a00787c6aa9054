"""Experiment configuration: JSON schema, defaults, validation, echo.

A config names a scenario (a grid spec or an explicit game file), solver
settings, evaluation settings, output paths and a master seed.  The seed is
mandatory -- nothing in the package defaults to wall-clock entropy.  Loading
materializes every default so the echoed config is complete.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ValidationError
from .game import GameSpec, PlayerMdp, validate_game
from .gridworld import GridSpec, P_CONVENTIONS, random_scenario
from .occupancy import EpsilonSchedule

SCHEMA_VERSION = 1

_SOLVER_DEFAULTS = {
    "max_iterations": 100,
    "convergence_tol": 1e-9,
    "epsilon": {"mode": "paper"},
    "p_convention": "success",
}
_EVAL_DEFAULTS = {"trials": 50, "methods": ["exact"]}


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully-resolved configuration; ``raw`` is the echo-ready dict."""

    raw: dict

    @property
    def seed(self) -> int:
        return self.raw["seed"]

    @property
    def scenario(self) -> dict:
        return self.raw["scenario"]

    @property
    def solver(self) -> dict:
        return self.raw["solver"]

    @property
    def evaluation(self) -> dict:
        return self.raw["evaluation"]

    @property
    def output_dir(self) -> Path:
        return Path(self.raw["output"]["directory"])

    @property
    def sweep(self) -> dict | None:
        return self.raw.get("sweep")

    def epsilon_schedule(self) -> EpsilonSchedule | None:
        return parse_epsilon(self.raw["solver"]["epsilon"])

    def build_game(self) -> GameSpec:
        scenario = self.scenario
        if scenario["type"] == "grid":
            spec = GridSpec(
                rows=scenario["rows"],
                cols=scenario["cols"],
                players=scenario["players"],
                horizon=scenario["horizon"],
                stochasticity=scenario["stochasticity"],
                seed=self.seed,
            )
            return random_scenario(spec, self.solver["p_convention"])
        return load_game_file(scenario["path"])


def parse_epsilon(spec) -> EpsilonSchedule | None:
    """Accept {"mode": "paper"|"off"} or {"mode": "custom", base, slope,
    offset}; returns None for "off" (no truncation)."""
    if isinstance(spec, str):
        spec = {"mode": spec}
    mode = spec.get("mode")
    if mode == "off":
        return None
    if mode == "paper":
        return EpsilonSchedule.paper_default()
    if mode == "custom":
        try:
            return EpsilonSchedule(
                float(spec["base"]), float(spec["slope"]), float(spec["offset"])
            )
        except KeyError as exc:
            raise ValidationError(
                f"solver.epsilon: custom mode needs base/slope/offset, missing {exc}"
            ) from None
    raise ValidationError(f"solver.epsilon.mode: unknown mode {mode!r}")


def parse_epsilon_flag(text: str) -> dict:
    """CLI form: "paper", "off", or "custom:base,slope,offset" (a bare
    comma triple is also accepted)."""
    if text in ("paper", "off"):
        return {"mode": text}
    body = text.split(":", 1)[1] if text.startswith("custom") else text
    parts = body.split(",")
    if len(parts) != 3:
        raise ValidationError(
            f"--epsilon expects paper, off, or custom:b,m,c; got {text!r}"
        )
    base, slope, offset = (float(p) for p in parts)
    return {"mode": "custom", "base": base, "slope": slope, "offset": offset}


def _require(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ValidationError(f"missing required field {path}{key}")
    return mapping[key]


def resolve_config(data: dict) -> ExperimentConfig:
    """Validate a raw dict and materialize all defaults."""
    if not isinstance(data, dict):
        raise ValidationError("config root must be an object")
    out = {"schema_version": data.get("schema_version", SCHEMA_VERSION)}
    seed = _require(data, "seed", "")
    if not isinstance(seed, int):
        raise ValidationError("seed must be an integer")
    out["seed"] = seed

    scenario = dict(_require(data, "scenario", ""))
    kind = scenario.get("type", "grid")
    if kind == "grid":
        for key in ("rows", "cols", "players", "horizon"):
            _require(scenario, key, "scenario.")
        scenario.setdefault("stochasticity", 0.95)
    elif kind == "file":
        _require(scenario, "path", "scenario.")
    else:
        raise ValidationError(f"scenario.type: unknown type {kind!r}")
    scenario["type"] = kind
    out["scenario"] = scenario

    solver = {**_SOLVER_DEFAULTS, **data.get("solver", {})}
    if solver["p_convention"] not in P_CONVENTIONS:
        raise ValidationError(
            f"solver.p_convention must be one of {P_CONVENTIONS}"
        )
    parse_epsilon(solver["epsilon"])
    if isinstance(solver["epsilon"], str):
        solver["epsilon"] = {"mode": solver["epsilon"]}
    out["solver"] = solver

    evaluation = {**_EVAL_DEFAULTS, **data.get("evaluation", {})}
    for method in evaluation["methods"]:
        if method not in ("exact", "monte-carlo"):
            raise ValidationError(f"evaluation.methods: unknown method {method!r}")
    out["evaluation"] = evaluation

    output = dict(data.get("output", {}))
    output.setdefault("directory", "runs")
    out["output"] = output

    if "sweep" in data:
        sweep = dict(data["sweep"])
        grids = _require(sweep, "grids", "sweep.")
        for cell in grids:
            if len(cell) != 2:
                raise ValidationError("sweep.grids entries must be [rows, cols] pairs")
        sweep.setdefault("trials", 1)
        out["sweep"] = sweep

    config = ExperimentConfig(out)
    if kind == "grid":
        # Surface GridSpec invariant violations as config errors with a path.
        try:
            config.build_game()
        except Exception as exc:
            raise ValidationError(f"scenario: {exc}") from exc
    return config


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON config file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return resolve_config(data)


def load_game_file(path) -> GameSpec:
    """Explicit game description: players with kernels, initial laws and
    target sets, plus a horizon.  Validated on load."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    try:
        players = tuple(
            PlayerMdp(
                np.asarray(p["kernel"], dtype=np.float64),
                np.asarray(p["initial_dist"], dtype=np.float64),
                p["target_set"],
            )
            for p in data["players"]
        )
        game = GameSpec(players, int(data["horizon"]))
    except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
        raise ValidationError(f"{path}: malformed game description: {exc}") from None
    report = validate_game(game)
    if not report.ok:
        raise ValidationError(f"{path}: invalid game:\n{report}")
    return game


def save_game_file(path, game: GameSpec):
    data = {
        "horizon": game.horizon,
        "players": [
            {
                "kernel": mdp.kernel.tolist(),
                "initial_dist": mdp.initial_dist.tolist(),
                "target_set": mdp.target_set.tolist(),
            }
            for mdp in game.players
        ],
    }
    Path(path).write_text(json.dumps(data))
