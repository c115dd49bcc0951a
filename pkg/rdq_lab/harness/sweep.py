"""Novelty sweeps: baseline training, then per-level adaptation runs.

Layout under the output directory::

    baseline/<agent>.csv|.npz|.rules     one pre-novelty run per agent kind
    levels/<novelty>/level<L>.yaml       the generated levels
    cells/<novelty>/<agent>_level<L>_seed<S>.csv
    summary.csv, recovery.csv, drops.csv

Every cell restores its agent from the baseline checkpoint and reseeds it
with a stream derived from (root seed, novelty, level, seed index), so a
cell's CSV does not depend on execution order or worker count.
"""

from __future__ import annotations

import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from rdq_lab.agent.trainer import Agent, train
from rdq_lab.config.loader import dump_level_config
from rdq_lab.config.schema import LabConfig, resolve_domain_default
from rdq_lab.display.logging_config import current_log_file, init_worker_logging
from rdq_lab.envs.core import baseline_level
from rdq_lab.envs.novelty import generate_novelty_levels
from rdq_lab.envs.types import LevelConfig
from rdq_lab.harness.aggregate import AggregateTables, aggregate, load_results, write_tables

logger = logging.getLogger(__name__)

BASELINE_DIR = "baseline"
CELLS_DIR = "cells"
LEVELS_DIR = "levels"


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed from *parts* (SHA-256 of their ``/``-joined text)."""
    digest = hashlib.sha256("/".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def cell_file_name(agent: str, level_index: int, seed_index: int) -> str:
    return f"{agent}_level{level_index}_seed{seed_index}"


@dataclass(frozen=True)
class SweepCell:
    novelty: str
    level: LevelConfig
    seed_index: int
    agent: str
    seed: int

    @property
    def label(self) -> str:
        name = cell_file_name(self.agent, self.level.level_index, self.seed_index)
        return f"{self.novelty}/{name}"


@dataclass
class CellResult:
    cell: SweepCell
    csv_path: str = ""
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SweepResult:
    output_dir: str
    baselines: Dict[str, str] = field(default_factory=dict)
    cells: List[CellResult] = field(default_factory=list)
    tables: Optional[AggregateTables] = None

    @property
    def failures(self) -> List[CellResult]:
        return [c for c in self.cells if not c.ok]


def run_cell(cell: SweepCell, checkpoint: str, out_dir: str, episodes: int) -> str:
    """Restore the baseline agent, inject the cell's level and train; returns the CSV path."""
    agent = Agent.from_checkpoint(checkpoint)
    agent.reseed(cell.seed)
    cell_dir = os.path.join(out_dir, CELLS_DIR, cell.novelty)
    log = train(
        cell.level,
        cell.agent,
        agent.cfg,
        cell.seed,
        cell_dir,
        agent=agent,
        episodes=episodes,
        run_id=cell_file_name(cell.agent, cell.level.level_index, cell.seed_index),
        keep_checkpoint=False,
    )
    return log.csv_path


def plan_cells(cfg: LabConfig, out_dir: Optional[str] = None) -> List[SweepCell]:
    """All (novelty, level, seed, agent) cells; levels are written to ``levels/`` if *out_dir*."""
    exp = cfg.experiment
    cells: List[SweepCell] = []
    for novelty in exp.novelties:
        levels = generate_novelty_levels(
            exp.domain,
            novelty,
            exp.levels_per_novelty,
            seed=derive_seed(exp.root_seed, novelty) % (2**31),
            max_steps=cfg.env.max_steps,
        )
        for level in levels:
            if out_dir is not None:
                dump_level_config(
                    level,
                    os.path.join(out_dir, LEVELS_DIR, novelty, f"level{level.level_index}.yaml"),
                )
            for seed_index in range(exp.seeds):
                seed = derive_seed(exp.root_seed, novelty, level.level_index, seed_index)
                for agent in exp.agents:
                    cells.append(SweepCell(novelty, level, seed_index, agent, seed))
    return cells


def _run_cells(
    cells: List[SweepCell],
    checkpoints: Dict[str, str],
    out_dir: str,
    episodes: int,
    parallel: int,
) -> List[CellResult]:
    results: Dict[int, CellResult] = {}
    if parallel <= 1:
        for i, cell in enumerate(cells):
            try:
                path = run_cell(cell, checkpoints[cell.agent], out_dir, episodes)
                results[i] = CellResult(cell, csv_path=path)
            except Exception as exc:
                logger.exception("Cell %s failed", cell.label)
                results[i] = CellResult(cell, error=f"{type(exc).__name__}: {exc}")
            logger.info("Cell %d/%d done: %s", i + 1, len(cells), cell.label)
    else:
        active_log = current_log_file()
        pool_kwargs: Dict[str, Any] = (
            {"initializer": init_worker_logging, "initargs": active_log} if active_log else {}
        )
        with ProcessPoolExecutor(max_workers=parallel, **pool_kwargs) as pool:
            futures = {
                pool.submit(run_cell, cell, checkpoints[cell.agent], out_dir, episodes): i
                for i, cell in enumerate(cells)
            }
            for done, future in enumerate(as_completed(futures), start=1):
                i = futures[future]
                try:
                    results[i] = CellResult(cells[i], csv_path=future.result())
                except Exception as exc:
                    logger.error("Cell %s failed: %s", cells[i].label, exc)
                    results[i] = CellResult(cells[i], error=f"{type(exc).__name__}: {exc}")
                logger.info("Cell %d/%d done: %s", done, len(cells), cells[i].label)
    return [results[i] for i in range(len(cells))]


def run_experiment(cfg: LabConfig, out_dir: Optional[str] = None) -> SweepResult:
    """Train baselines, run every sweep cell and aggregate the results."""
    exp = cfg.experiment
    out = out_dir or exp.output_dir
    os.makedirs(out, exist_ok=True)
    result = SweepResult(output_dir=out)

    base = baseline_level(exp.domain, cfg.env.max_steps)
    baseline_dir = os.path.join(out, BASELINE_DIR)
    checkpoints: Dict[str, str] = {}
    for agent in exp.agents:
        log = train(
            base,
            agent,
            cfg,
            exp.root_seed,
            baseline_dir,
            episodes=exp.pre_episodes,
            run_id=agent,
        )
        result.baselines[agent] = log.csv_path
        checkpoints[agent] = log.checkpoint_path

    cells = plan_cells(cfg, out)
    logger.info(
        "Sweep over %d cell(s): %d novelt(ies) × %d level(s) × %d seed(s) × %d agent(s)",
        len(cells),
        len(exp.novelties),
        exp.levels_per_novelty,
        exp.seeds,
        len(exp.agents),
    )
    result.cells = _run_cells(cells, checkpoints, out, exp.post_episodes, exp.parallel)
    if result.failures:
        logger.warning("%d of %d cell(s) failed", len(result.failures), len(cells))

    if any(c.ok for c in result.cells):
        result.tables = aggregate(
            load_results(out),
            pre_window=exp.pre_window,
            post_window=exp.post_window,
            recovery_threshold=resolve_domain_default(
                exp.domain, "recovery_threshold", exp.recovery_threshold
            ),
            post_budget=exp.post_episodes,
        )
        write_tables(result.tables, out)
    return result
