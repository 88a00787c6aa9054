"""Experiment orchestration: solve one scenario, or sweep a parameter grid."""

import numpy as np

from ._kernels import backend_name
from .config import ExperimentConfig, resolve_config
from .errors import SizeGuardError
from .ibr import IbrConfig, default_initial_policies, run_ibr
from .jointvalue import potential_value
from .metrics import compute_metrics
from .oracle import global_dp, verify_nash
from .report import IterationRecord, RunReport, policies_to_lists

SWEEP_DELTA_TOL = 1e-5


def _derived_seed(master: int, *key: int) -> int:
    """Stable per-cell / per-iteration seed stream."""
    return int(np.random.SeedSequence(master, spawn_key=key).generate_state(1)[0])


def _metric_records(config: ExperimentConfig, game, policies, sp_policies, iteration):
    records = []
    trials = config.evaluation["trials"]
    for method in config.evaluation["methods"]:
        records.append(
            compute_metrics(
                game,
                policies,
                sp_policies,
                iteration,
                method=method,
                trials=trials,
                seed=_derived_seed(config.seed, 1, iteration),
            )
        )
    return records


def run_solve(config: ExperimentConfig, with_oracle: bool = False) -> RunReport:
    """Build the scenario, run iterative best response, compute metrics after
    every response, and assemble the report (baseline metrics are iteration 0;
    the k-th response is iteration k)."""
    game = config.build_game()
    schedule = config.epsilon_schedule()
    solver = config.solver
    sp_policies = default_initial_policies(game)

    baseline = _metric_records(config, game, sp_policies, sp_policies, 0)
    iterations = []

    def observer(k, player, policies, step):
        iterations.append(
            IterationRecord(
                iteration=k + 1,
                player=player,
                potential=step.potential,
                seconds=step.seconds,
                metrics=_metric_records(config, game, policies, sp_policies, k + 1),
            )
        )

    ibr_config = IbrConfig(
        max_iterations=solver["max_iterations"],
        convergence_tol=solver["convergence_tol"],
        schedule=schedule,
        seed=config.seed,
    )
    policies, trace = run_ibr(game, ibr_config, sp_policies, observer)

    certificates = None
    if with_oracle:
        certificates = oracle_certificates(game, policies)
    return RunReport(
        config=config.raw,
        initial_potential=trace.initial_potential,
        baseline_metrics=baseline,
        iterations=iterations,
        final_policies=policies_to_lists(policies),
        converged=trace.converged,
        backend=backend_name(),
        certificates=certificates,
    )


def oracle_certificates(game, policies, nash_tol: float = 1e-10) -> dict:
    """Global-feedback optimum and exhaustive deviation check for a solved
    joint policy.  Raises SizeGuardError on instances beyond the guards."""
    _, global_value = global_dp(game)
    nash = verify_nash(game, policies, nash_tol)
    return {
        "achieved_potential": potential_value(game, policies),
        "global_optimum": global_value,
        "nash_tol": nash_tol,
        "nash_base_value": nash.base_value,
        "improving_deviations": [
            {
                "player": d.player,
                "actions": d.actions.tolist(),
                "value": d.value,
                "gain": d.gain,
            }
            for d in nash.improving
        ],
        "deviations_checked": nash.deviations_checked,
    }


def iterations_to_tol(report: RunReport, tol: float = SWEEP_DELTA_TOL) -> int:
    """Number of best responses until the per-response objective change first
    drops below tol (total count if it never does)."""
    last = report.initial_potential
    for idx, record in enumerate(report.iterations):
        if abs(record.potential - last) < tol:
            return idx + 1
        last = record.potential
    return len(report.iterations)


def run_sweep(config: ExperimentConfig):
    """Cross-product sweep over grid sizes with seeded trials per cell.

    Returns (cell results, summary rows); cell failures are recorded and do
    not abort the sweep.  Summary rows are
    (state size, players, stochasticity, mean seconds per response,
    mean responses to the sweep tolerance).
    """
    sweep = config.sweep
    if sweep is None:
        raise SizeGuardError("config has no sweep section")  # pragma: no cover
    cells = []
    summary = []
    base = {k: v for k, v in config.raw.items() if k != "sweep"}
    for cell_idx, (rows, cols) in enumerate(sweep["grids"]):
        cell_reports = []
        failures = []
        seconds = []
        iteration_counts = []
        for trial in range(sweep["trials"]):
            raw = {
                **base,
                "seed": _derived_seed(config.seed, 2, cell_idx, trial),
                "scenario": {
                    **config.scenario,
                    "rows": rows,
                    "cols": cols,
                },
            }
            try:
                report = run_solve(resolve_config(raw))
            except Exception as exc:  # partial failures recorded, sweep continues
                failures.append(f"trial {trial}: {exc}")
                continue
            cell_reports.append(report)
            if report.iterations:
                seconds.append(
                    float(np.mean([r.seconds for r in report.iterations]))
                )
            iteration_counts.append(iterations_to_tol(report))
        cells.append(
            {
                "rows": rows,
                "cols": cols,
                "reports": cell_reports,
                "failures": failures,
            }
        )
        summary.append(
            (
                rows * cols,
                config.scenario["players"],
                config.scenario["stochasticity"],
                float(np.mean(seconds)) if seconds else float("nan"),
                float(np.mean(iteration_counts)) if iteration_counts else float("nan"),
            )
        )
    return cells, summary
