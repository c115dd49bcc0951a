"""Mutable training state and the learning-mode machine."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from rdq_lab.neural.mlp import MlpParams
from rdq_lab.neural.optim import AdamState
from rdq_lab.rules.memory import ConsistencySample, FailureMemory
from rdq_lab.rules.models import RuleSet

logger = logging.getLogger(__name__)


class AgentKind(str, Enum):
    DQN = "dqn"
    RDQ = "rdq"


class AgentMode(str, Enum):
    """Whether rule induction is active.

    Valid transitions:
        LEARNING_RULES → STABLE          (sustained rewards above threshold)
        STABLE         → LEARNING_RULES  (novelty detected)
    """

    LEARNING_RULES = "learning_rules"
    STABLE = "stable"


_VALID_TRANSITIONS: Dict[AgentMode, frozenset[AgentMode]] = {
    AgentMode.LEARNING_RULES: frozenset({AgentMode.STABLE}),
    AgentMode.STABLE: frozenset({AgentMode.LEARNING_RULES}),
}


def is_valid_transition(current: AgentMode, target: AgentMode) -> bool:
    """Check whether a mode transition is allowed."""
    return target in _VALID_TRANSITIONS.get(current, frozenset())


@dataclass
class EpsilonSchedule:
    """Linear decay from an anchor ``(step, value)`` down to *end*.

    ``restart`` moves the anchor, so after a novelty the schedule decays
    again from the restart value over the same number of steps.
    """

    start: float = 1.0
    end: float = 0.05
    decay_steps: int = 10_000
    anchor_step: int = 0
    anchor_value: Optional[float] = None

    def __post_init__(self) -> None:
        if self.anchor_value is None:
            self.anchor_value = self.start

    def value(self, step: int) -> float:
        assert self.anchor_value is not None
        frac = min(max(step - self.anchor_step, 0) / self.decay_steps, 1.0)
        eps = self.anchor_value + frac * (self.end - self.anchor_value)
        return float(min(max(eps, 0.0), 1.0))

    def restart(self, step: int, value: float) -> None:
        self.anchor_step = step
        self.anchor_value = value


@dataclass
class TrainState:
    """Everything a training loop mutates.

    ``target`` is always a past copy of ``online``; it only changes in
    :func:`rdq_lab.agent.learner.sync_target`.
    """

    online: MlpParams
    target: MlpParams
    opt: AdamState
    epsilon: EpsilonSchedule
    rules: RuleSet = field(default_factory=RuleSet)
    memory: FailureMemory = field(default_factory=FailureMemory)
    consistency: ConsistencySample = field(default_factory=ConsistencySample)
    step: int = 0
    episode: int = 0
    mode: AgentMode = AgentMode.LEARNING_RULES
    stable_streak: int = 0

    def set_mode(self, target: AgentMode) -> None:
        if not is_valid_transition(self.mode, target):
            raise ValueError(f"Invalid mode transition {self.mode.value} → {target.value}")
        logger.info("Mode %s → %s at episode %d", self.mode.value, target.value, self.episode)
        self.mode = target


# ── Novelty detection ────────────────────────────────────────────────────


def detect_novelty(episode_reward: float, threshold: float, mode: AgentMode) -> bool:
    """True iff the episode reward is strictly below *threshold* in STABLE mode."""
    return mode == AgentMode.STABLE and episode_reward < threshold


def advance_mode(
    ts: TrainState,
    episode_reward: float,
    threshold: float,
    stable_episodes: int,
) -> Optional[Tuple[AgentMode, AgentMode, str]]:
    """Apply the end-of-episode mode machine.

    Returns ``(previous, current, reason)`` when the mode changed. The
    caller reacts to a switch into LEARNING_RULES (clear rules, restart ε).
    """
    previous = ts.mode
    if detect_novelty(episode_reward, threshold, ts.mode):
        ts.stable_streak = 0
        ts.set_mode(AgentMode.LEARNING_RULES)
        return previous, ts.mode, "novelty"
    if ts.mode == AgentMode.LEARNING_RULES:
        ts.stable_streak = ts.stable_streak + 1 if episode_reward > threshold else 0
        if ts.stable_streak >= stable_episodes:
            ts.stable_streak = 0
            ts.set_mode(AgentMode.STABLE)
            return previous, ts.mode, f"{stable_episodes} episode(s) above threshold"
    return None
