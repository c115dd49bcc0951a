"""Novelty sweeps, aggregation and evaluation."""

from rdq_lab.harness.aggregate import (
    AggregateTables,
    SweepTables,
    aggregate,
    episodes_to_recovery,
    load_results,
    report,
    write_tables,
)
from rdq_lab.harness.evaluate import EvalResult, Trajectory, evaluate
from rdq_lab.harness.sweep import (
    CellResult,
    SweepCell,
    SweepResult,
    derive_seed,
    plan_cells,
    run_cell,
    run_experiment,
)

__all__ = [
    "AggregateTables",
    "CellResult",
    "EvalResult",
    "SweepCell",
    "SweepResult",
    "SweepTables",
    "Trajectory",
    "aggregate",
    "derive_seed",
    "episodes_to_recovery",
    "evaluate",
    "load_results",
    "plan_cells",
    "report",
    "run_cell",
    "run_experiment",
    "write_tables",
]
