"""Per-episode metrics of a training run, written as CSV with pandas."""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, field
from typing import List

import pandas as pd

from rdq_lab.errors import ConfigurationError

logger = logging.getLogger(__name__)

RUN_LOG_COLUMNS = [
    "episode",
    "total_reward",
    "steps",
    "epsilon",
    "q_loss_mean",
    "kl_loss_mean",
    "rules_count",
    "overridden_actions",
    "failures",
    "mode",
]


@dataclass
class EpisodeRecord:
    episode: int
    total_reward: float
    steps: int
    epsilon: float
    q_loss_mean: float
    kl_loss_mean: float
    rules_count: int
    overridden_actions: int
    failures: int
    mode: str


@dataclass
class RunLog:
    """Episode records of one run plus where its artifacts were written."""

    run_id: str
    records: List[EpisodeRecord] = field(default_factory=list)
    csv_path: str = ""
    rules_path: str = ""
    memory_path: str = ""
    checkpoint_path: str = ""

    def append(self, record: EpisodeRecord) -> None:
        self.records.append(record)

    def rewards(self) -> List[float]:
        return [r.total_reward for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.records], columns=RUN_LOG_COLUMNS)

    def write_csv(self, path: str) -> str:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        self.to_frame().to_csv(path, index=False)
        self.csv_path = path
        logger.debug("Run log with %d episode(s) written to %s", len(self.records), path)
        return path

    def __len__(self) -> int:
        return len(self.records)


def read_run_log(path: str) -> pd.DataFrame:
    """Load a run-log CSV, checking it has the expected columns."""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ConfigurationError(f"Cannot read run log '{path}': {exc}") from exc
    missing = [c for c in RUN_LOG_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigurationError(f"Run log '{path}' lacks column(s) {missing}.")
    return frame
