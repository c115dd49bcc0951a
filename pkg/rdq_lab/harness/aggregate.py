"""Summary tables computed from stored run-log CSVs only.

``summary.csv``  novelty, agent, episode_index, mean_reward, std_reward, n
``recovery.csv`` novelty, agent, median_episodes_to_recovery
``drops.csv``    novelty, agent, pre_mean, post_mean, drop

Pre-novelty rows come from the last ``pre_window`` baseline episodes and
carry negative episode indices (-pre_window .. -1).
"""

from __future__ import annotations

import glob
import logging
import os
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from rdq_lab.agent.runlog import read_run_log
from rdq_lab.errors import ConfigurationError

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["novelty", "agent", "episode_index", "mean_reward", "std_reward", "n"]
RECOVERY_COLUMNS = ["novelty", "agent", "median_episodes_to_recovery"]
DROPS_COLUMNS = ["novelty", "agent", "pre_mean", "post_mean", "drop"]

_CELL_RE = re.compile(r"^(?P<agent>[a-z]+)_level(?P<level>\d+)_seed(?P<seed>\d+)\.csv$")


@dataclass
class SweepTables:
    """Raw reward series: one baseline frame per agent plus one long cell frame.

    ``cells`` has columns novelty, agent, level, seed_index, episode, total_reward.
    """

    baselines: Dict[str, pd.DataFrame]
    cells: pd.DataFrame


@dataclass
class AggregateTables:
    summary: pd.DataFrame
    recovery: pd.DataFrame
    drops: pd.DataFrame


def load_results(out_dir: str) -> SweepTables:
    """Collect ``baseline/*.csv`` and ``cells/<novelty>/*.csv`` below *out_dir*."""
    baselines: Dict[str, pd.DataFrame] = {}
    for path in sorted(glob.glob(os.path.join(out_dir, "baseline", "*.csv"))):
        agent = os.path.splitext(os.path.basename(path))[0]
        baselines[agent] = read_run_log(path)

    frames: List[pd.DataFrame] = []
    for path in sorted(glob.glob(os.path.join(out_dir, "cells", "*", "*.csv"))):
        match = _CELL_RE.match(os.path.basename(path))
        if match is None:
            logger.warning("Ignoring unexpected file %s", path)
            continue
        run = read_run_log(path)
        frames.append(
            pd.DataFrame(
                {
                    "novelty": os.path.basename(os.path.dirname(path)),
                    "agent": match.group("agent"),
                    "level": int(match.group("level")),
                    "seed_index": int(match.group("seed")),
                    "episode": run["episode"].astype(int),
                    "total_reward": run["total_reward"].astype(float),
                }
            )
        )
    if not frames:
        raise ConfigurationError(f"No sweep cell CSVs found under '{out_dir}'.")
    cells = pd.concat(frames, ignore_index=True)
    logger.debug("Loaded %d baseline(s) and %d cell run(s)", len(baselines), len(frames))
    return SweepTables(baselines=baselines, cells=cells)


def episodes_to_recovery(
    rewards: Sequence[float],
    threshold: float,
    budget: Optional[int] = None,
) -> int:
    """Index of the first episode with reward ≥ *threshold*; *budget* (or the length) if none."""
    hits = np.flatnonzero(np.asarray(rewards, dtype=np.float64) >= threshold)
    if hits.size:
        return int(hits[0])
    return len(rewards) if budget is None else budget


def _summary(tables: SweepTables, pre_window: int) -> pd.DataFrame:
    post = (
        tables.cells.groupby(["novelty", "agent", "episode"])["total_reward"]
        .agg(mean_reward="mean", std_reward=lambda x: float(np.std(x, ddof=0)), n="count")
        .reset_index()
        .rename(columns={"episode": "episode_index"})
    )
    pre_rows: List[Dict[str, object]] = []
    for novelty, agent in post[["novelty", "agent"]].drop_duplicates().itertuples(index=False):
        baseline = tables.baselines.get(agent)
        if baseline is None:
            continue
        tail = baseline["total_reward"].to_numpy(dtype=np.float64)[-pre_window:]
        for offset, reward in enumerate(tail):
            pre_rows.append(
                {
                    "novelty": novelty,
                    "agent": agent,
                    "episode_index": offset - len(tail),
                    "mean_reward": float(reward),
                    "std_reward": 0.0,
                    "n": 1,
                }
            )
    summary = pd.concat([pd.DataFrame(pre_rows, columns=SUMMARY_COLUMNS), post], ignore_index=True)
    summary = summary.sort_values(["novelty", "agent", "episode_index"], kind="mergesort")
    return summary[SUMMARY_COLUMNS].reset_index(drop=True)


def _recovery(tables: SweepTables, threshold: float, budget: Optional[int]) -> pd.DataFrame:
    rows = []
    runs = tables.cells.sort_values("episode", kind="mergesort")
    per_run = runs.groupby(["novelty", "agent", "level", "seed_index"])["total_reward"]
    for (novelty, agent, _, _), series in per_run:
        rows.append(
            {
                "novelty": novelty,
                "agent": agent,
                "episodes": episodes_to_recovery(series.to_list(), threshold, budget),
            }
        )
    frame = pd.DataFrame(rows, columns=["novelty", "agent", "episodes"])
    recovery = (
        frame.groupby(["novelty", "agent"])["episodes"]
        .median()
        .reset_index()
        .rename(columns={"episodes": "median_episodes_to_recovery"})
    )
    return recovery[RECOVERY_COLUMNS]


def _drops(tables: SweepTables, pre_window: int, post_window: int) -> pd.DataFrame:
    early = tables.cells[tables.cells["episode"] < post_window]
    rows = []
    for (novelty, agent), group in early.groupby(["novelty", "agent"]):
        baseline = tables.baselines.get(agent)
        pre_mean = (
            float(baseline["total_reward"].to_numpy(dtype=np.float64)[-pre_window:].mean())
            if baseline is not None and len(baseline)
            else float("nan")
        )
        post_mean = float(group["total_reward"].mean())
        rows.append(
            {
                "novelty": novelty,
                "agent": agent,
                "pre_mean": pre_mean,
                "post_mean": post_mean,
                "drop": pre_mean - post_mean,
            }
        )
    return pd.DataFrame(rows, columns=DROPS_COLUMNS)


def aggregate(
    tables: SweepTables,
    *,
    pre_window: int,
    post_window: int,
    recovery_threshold: float,
    post_budget: Optional[int] = None,
) -> AggregateTables:
    """Mean/std curves, median episodes-to-recovery and pre/post drops.

    A pure function of the raw series; runs that never reach the threshold
    count as *post_budget* episodes (their own length when unset).
    """
    if tables.cells.empty:
        raise ConfigurationError("Cannot aggregate an empty set of runs.")
    return AggregateTables(
        summary=_summary(tables, pre_window),
        recovery=_recovery(tables, recovery_threshold, post_budget),
        drops=_drops(tables, pre_window, post_window),
    )


def write_tables(tables: AggregateTables, out_dir: str) -> Dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "summary": os.path.join(out_dir, "summary.csv"),
        "recovery": os.path.join(out_dir, "recovery.csv"),
        "drops": os.path.join(out_dir, "drops.csv"),
    }
    tables.summary.to_csv(paths["summary"], index=False)
    tables.recovery.to_csv(paths["recovery"], index=False)
    tables.drops.to_csv(paths["drops"], index=False)
    logger.info("Wrote %s", ", ".join(paths.values()))
    return paths


def report(
    out_dir: str,
    *,
    pre_window: int,
    post_window: int,
    recovery_threshold: float,
    post_budget: Optional[int] = None,
) -> Dict[str, str]:
    """Re-aggregate the CSVs under *out_dir* and rewrite the summary tables."""
    tables = aggregate(
        load_results(out_dir),
        pre_window=pre_window,
        post_window=post_window,
        recovery_threshold=recovery_threshold,
        post_budget=post_budget,
    )
    return write_tables(tables, out_dir)
