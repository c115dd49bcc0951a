"""Structured JSON-line events emitted during training runs."""

from rdq_lab.events.logger import EVENT_LEVEL, EventLogger
from rdq_lab.events.models import (
    CheckpointSaved,
    ModeChange,
    NoveltyDetected,
    RuleSetUpdate,
    RunEvent,
    RunFinished,
)

__all__ = [
    "EVENT_LEVEL",
    "CheckpointSaved",
    "EventLogger",
    "ModeChange",
    "NoveltyDetected",
    "RuleSetUpdate",
    "RunEvent",
    "RunFinished",
]
