"""Per-run JSON-line event stream.

A training run writes its rule-set updates, novelty detections, mode
changes and checkpoints to ``<run_id>.events.jsonl`` next to its CSV.
Records go through a private ``logging`` logger at the custom ``EVENT``
level with propagation off, so they stay out of the diagnostic log and
are written whatever ``--log-level`` says.

Timestamps and event ids make these files differ between otherwise
identical runs; reproducibility checks compare CSV and rule files only.
"""

from __future__ import annotations

import logging
import os
from collections import Counter
from logging.handlers import RotatingFileHandler
from typing import Dict, Optional

from pydantic import BaseModel

from rdq_lab.events.models import RunEvent

logger = logging.getLogger(__name__)

# Between WARNING (30) and ERROR (40)
EVENT_LEVEL = 35
logging.addLevelName(EVENT_LEVEL, "EVENT")

# A long crossroad run with frequent induction stays far below this.
_MAX_BYTES = 20 * 1024 * 1024
_BACKUP_COUNT = 3


class EventLogger:
    """Event writer bound to one run id.

    ``path=None`` gives a disabled logger: calls are accepted and counted
    but nothing touches the filesystem. Usable as a context manager.
    """

    def __init__(self, run_id: str, path: Optional[str] = None) -> None:
        self.run_id = run_id
        self.path = path
        self._counts: Counter[str] = Counter()
        self._handler: Optional[RotatingFileHandler] = None
        self._stream = logging.getLogger(f"rdq_lab.events.run.{run_id}")
        self._stream.setLevel(EVENT_LEVEL)
        self._stream.propagate = False

        if path is not None:
            parent = os.path.dirname(path)
            if parent:
                os.makedirs(parent, exist_ok=True)
            self._handler = RotatingFileHandler(
                path, mode="w", maxBytes=_MAX_BYTES, backupCount=_BACKUP_COUNT, encoding="utf-8"
            )
            self._handler.setFormatter(logging.Formatter("%(message)s"))
            self._stream.addHandler(self._handler)
            logger.debug("Run %s: events -> %s", run_id, path)

    def __enter__(self) -> "EventLogger":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    @property
    def enabled(self) -> bool:
        return self._handler is not None

    @property
    def counts(self) -> Dict[str, int]:
        """Events recorded so far, by type."""
        return dict(sorted(self._counts.items()))

    def record(self, payload: BaseModel, *, episode: int = 0, step: int = 0) -> RunEvent:
        """Wrap *payload* in a :class:`RunEvent` for this run and write it."""
        event = RunEvent.of(self.run_id, payload, episode=episode, step=step)
        self.emit(event)
        return event

    def emit(self, event: RunEvent) -> None:
        self._counts[event.event_type] += 1
        if self._handler is None:
            return
        try:
            self._stream.log(EVENT_LEVEL, event.model_dump_json())
        except Exception:
            logger.exception("Run %s: could not write %s event", self.run_id, event.event_type)

    def close(self) -> None:
        if self._handler is None:
            return
        self._handler.close()
        self._stream.removeHandler(self._handler)
        self._handler = None
