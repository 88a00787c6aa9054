"""Run reports and flat CSV output.

A RunReport echoes the fully-resolved config, carries the solver trace with
per-iteration metrics, the final policies, and optional oracle certificates.
Reports serialize to JSON and round-trip losslessly; the companion CSV holds
one row per best response for plotting.
"""

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .game import Policy
from .metrics import MetricsRecord

CSV_HEADER = (
    "iteration",
    "player",
    "potential",
    "collision_likelihood",
    "reach_reduction",
    "seconds",
)


@dataclass
class IterationRecord:
    iteration: int
    player: int
    potential: float
    seconds: float
    metrics: list = field(default_factory=list)


@dataclass
class RunReport:
    config: dict
    initial_potential: float
    baseline_metrics: list
    iterations: list
    final_policies: list
    converged: bool
    backend: str
    certificates: dict | None = None
    schema_version: int = 1

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "initial_potential": self.initial_potential,
            "baseline_metrics": [asdict(m) for m in self.baseline_metrics],
            "iterations": [asdict(it) for it in self.iterations],
            "final_policies": self.final_policies,
            "converged": self.converged,
            "backend": self.backend,
            "certificates": self.certificates,
        }

    @staticmethod
    def from_dict(data: dict) -> "RunReport":
        return RunReport(
            config=data["config"],
            initial_potential=data["initial_potential"],
            baseline_metrics=[
                MetricsRecord(**m) for m in data["baseline_metrics"]
            ],
            iterations=[
                IterationRecord(
                    iteration=it["iteration"],
                    player=it["player"],
                    potential=it["potential"],
                    seconds=it["seconds"],
                    metrics=[MetricsRecord(**m) for m in it["metrics"]],
                )
                for it in data["iterations"]
            ],
            final_policies=data["final_policies"],
            converged=data["converged"],
            backend=data["backend"],
            certificates=data.get("certificates"),
            schema_version=data.get("schema_version", 1),
        )

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @staticmethod
    def load(path) -> "RunReport":
        return RunReport.from_dict(json.loads(Path(path).read_text()))

    def policies(self) -> list:
        return [
            Policy(p["owner"], np.asarray(p["table"], dtype=np.float64))
            for p in self.final_policies
        ]


def policies_to_lists(policies) -> list:
    return [{"owner": p.owner, "table": p.table.tolist()} for p in policies]


def _iteration_csv_row(record: IterationRecord) -> list:
    """Prefer the first metrics record of an iteration for the CSV columns;
    fall back to the trace potential when no metrics were computed."""
    if record.metrics:
        m = record.metrics[0]
        return [
            record.iteration,
            record.player,
            repr(m.potential),
            repr(m.collision_likelihood),
            repr(m.reach_reduction),
            repr(record.seconds),
        ]
    return [
        record.iteration,
        record.player,
        repr(record.potential),
        "",
        "",
        repr(record.seconds),
    ]


def write_metrics_csv(path, report: RunReport):
    """One row per best response, deterministic formatting (repr floats)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for record in report.iterations:
            writer.writerow(_iteration_csv_row(record))


SWEEP_HEADER = (
    "state_size",
    "players",
    "stochasticity",
    "mean_seconds_per_iteration",
    "mean_iterations_to_tol",
)


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([row[0], row[1], repr(row[2]), repr(row[3]), repr(row[4])])
