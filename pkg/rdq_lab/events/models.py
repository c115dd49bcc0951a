"""Run event models.

Each event records *when* something changed in a training run, *where*
(episode, step) and the structured payload describing the change.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Dict, List, Optional
from uuid import uuid4

from pydantic import BaseModel, Field


class RuleSetUpdate(BaseModel):
    """A new RuleSet replaced the active one."""

    version: int
    rules: List[str] = Field(default_factory=list)
    positives: int = 0
    unexplained: int = 0
    candidates_tested: int = 0


class NoveltyDetected(BaseModel):
    """An episode reward fell below the novelty threshold in stable mode."""

    episode_reward: float
    threshold: float
    cleared_rules: int = 0
    cleared_failures: int = 0


class ModeChange(BaseModel):
    previous: str
    current: str
    reason: str = ""


class CheckpointSaved(BaseModel):
    path: str
    kind: str = "periodic"  # "periodic" | "final" | "diagnostic"


class RunEvent(BaseModel):
    """A single structured run event."""

    timestamp: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    event_type: str
    event_id: str = Field(default_factory=lambda: str(uuid4()))
    run_id: str
    episode: int = 0
    step: int = 0
    payload: Dict[str, Any] = Field(default_factory=dict)

    @classmethod
    def of(
        cls,
        run_id: str,
        payload: BaseModel,
        *,
        episode: int = 0,
        step: int = 0,
        event_type: Optional[str] = None,
    ) -> "RunEvent":
        """Wrap *payload*; the event type defaults to the payload class name."""
        return cls(
            event_type=event_type or type(payload).__name__,
            run_id=run_id,
            episode=episode,
            step=step,
            payload=payload.model_dump(),
        )


class RunFinished(BaseModel):
    """Last line of every events file."""

    episodes: int
    rules: int = 0
    # Events of each type written before this one.
    counts: Dict[str, int] = Field(default_factory=dict)
