"""Command-line interface.

Subcommands: solve, eval, oracle, sweep, validate.  Exit codes: 0 success,
2 solver ran but did not converge, 3 validation error, 4 oracle size guard.
"""

import argparse
import json
import sys
from pathlib import Path

from .config import load_game_file, parse_epsilon_flag, resolve_config
from .errors import ReachGameError, SizeGuardError, ValidationError
from .experiment import oracle_certificates, run_solve, run_sweep
from .game import validate_game
from .metrics import compute_metrics
from .ibr import default_initial_policies
from .report import RunReport, write_metrics_csv, write_sweep_csv

EXIT_OK = 0
EXIT_NON_CONVERGED = 2
EXIT_VALIDATION = 3
EXIT_SIZE_GUARD = 4


def _add_common(parser):
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="output directory override")
    parser.add_argument("--seed", type=int, help="master seed override")
    parser.add_argument("--epsilon", help="paper | off | custom:b,m,c")
    parser.add_argument(
        "--p-convention", choices=("success", "failure"), dest="p_convention"
    )
    parser.add_argument("--trials", type=int, help="Monte-Carlo trial count")
    parser.add_argument("--max-iters", type=int, dest="max_iters")
    parser.add_argument("--tol", type=float, help="IBR convergence tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reachgame",
        description="Multi-player reach-avoid Markov game solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run iterative best response")
    _add_common(solve)
    solve.add_argument(
        "--oracle",
        action="store_true",
        help="attach global-optimum and Nash certificates (small instances)",
    )

    evaluate = sub.add_parser("eval", help="recompute metrics for a saved run")
    _add_common(evaluate)
    evaluate.add_argument("--report", required=True, help="RunReport JSON path")

    oracle = sub.add_parser("oracle", help="certify a solved run against brute force")
    _add_common(oracle)
    oracle.add_argument("--report", help="RunReport JSON (otherwise solves first)")
    oracle.add_argument("--nash-tol", type=float, default=1e-10, dest="nash_tol")

    sweep = sub.add_parser("sweep", help="run the configured parameter sweep")
    _add_common(sweep)

    validate = sub.add_parser("validate", help="check a config / game description")
    _add_common(validate)
    return parser


def _load_with_overrides(args):
    raw = json.loads(Path(args.config).read_text())
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw.setdefault("output", {})["directory"] = args.out
    solver = raw.setdefault("solver", {})
    if args.epsilon is not None:
        solver["epsilon"] = parse_epsilon_flag(args.epsilon)
    if args.p_convention is not None:
        solver["p_convention"] = args.p_convention
    if args.max_iters is not None:
        solver["max_iterations"] = args.max_iters
    if args.tol is not None:
        solver["convergence_tol"] = args.tol
    if args.trials is not None:
        raw.setdefault("evaluation", {})["trials"] = args.trials
    return resolve_config(raw)


def _cmd_solve(args) -> int:
    config = _load_with_overrides(args)
    report = run_solve(config)
    exit_code = EXIT_OK if report.converged else EXIT_NON_CONVERGED
    if getattr(args, "oracle", False):
        try:
            report.certificates = oracle_certificates(
                config.build_game(), report.policies()
            )
        except SizeGuardError as exc:
            # keep the solve outputs; only the certificate is unavailable
            report.certificates = {"error": str(exc)}
            print(f"size guard: {exc}", file=sys.stderr)
            exit_code = EXIT_SIZE_GUARD
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    report.save(out_dir / "report.json")
    write_metrics_csv(out_dir / "metrics.csv", report)
    print(f"wrote {out_dir / 'report.json'} and {out_dir / 'metrics.csv'}")
    final = report.iterations[-1].potential if report.iterations else report.initial_potential
    print(
        f"converged={report.converged} responses={len(report.iterations)} "
        f"potential={final:.6g}"
    )
    return exit_code


def _cmd_eval(args) -> int:
    config = _load_with_overrides(args)
    report = RunReport.load(args.report)
    game = resolve_config(report.config).build_game()
    policies = report.policies()
    sp_policies = default_initial_policies(game)
    records = [
        compute_metrics(
            game,
            policies,
            sp_policies,
            iteration=len(report.iterations),
            method=method,
            trials=config.evaluation["trials"],
            seed=config.seed,
        )
        for method in config.evaluation["methods"]
    ]
    out = [record.__dict__ for record in records]
    print(json.dumps(out, indent=2))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "eval.json").write_text(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    config = _load_with_overrides(args)
    game = config.build_game()
    if args.report:
        policies = RunReport.load(args.report).policies()
    else:
        report = run_solve(config)
        policies = report.policies()
    certificates = oracle_certificates(game, policies, args.nash_tol)
    print(json.dumps(certificates, indent=2))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "certificates.json").write_text(
            json.dumps(certificates, indent=2)
        )
    return EXIT_OK if not certificates["improving_deviations"] else EXIT_NON_CONVERGED


def _cmd_sweep(args) -> int:
    config = _load_with_overrides(args)
    if config.sweep is None:
        raise ValidationError("config has no sweep section")
    cells, summary = run_sweep(config)
    out_dir = config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(out_dir / "sweep_summary.csv", summary)
    for idx, cell in enumerate(cells):
        cell_dir = out_dir / f"cell_{idx:02d}_{cell['rows']}x{cell['cols']}"
        cell_dir.mkdir(exist_ok=True)
        for trial, report in enumerate(cell["reports"]):
            report.save(cell_dir / f"trial_{trial:02d}.json")
        if cell["failures"]:
            (cell_dir / "failures.txt").write_text("\n".join(cell["failures"]))
    print(f"wrote {out_dir / 'sweep_summary.csv'}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = _load_with_overrides(args)
    scenario = config.scenario
    if scenario["type"] == "file":
        load_game_file(scenario["path"])
        print("valid")
        return EXIT_OK
    report = validate_game(config.build_game())
    print(report)
    return EXIT_OK if report.ok else EXIT_VALIDATION


_COMMANDS = {
    "solve": _cmd_solve,
    "eval": _cmd_eval,
    "oracle": _cmd_oracle,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SizeGuardError as exc:
        print(f"size guard: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except (ValidationError, ReachGameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
