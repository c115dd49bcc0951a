"""DQN baseline and RDQ agent: replay, safe action selection, losses, training loop."""

from rdq_lab.agent.learner import (
    LossReport,
    combined_loss_and_grad,
    kl_enabled,
    optimize_step,
    sync_target,
)
from rdq_lab.agent.policy import (
    Decision,
    act,
    build_teacher_policy,
    safe_mask,
    teacher_from_policy,
)
from rdq_lab.agent.replay import Batch, Experience, ReplayBuffer
from rdq_lab.agent.runlog import RUN_LOG_COLUMNS, EpisodeRecord, RunLog, read_run_log
from rdq_lab.agent.state import (
    AgentKind,
    AgentMode,
    EpsilonSchedule,
    TrainState,
    advance_mode,
    detect_novelty,
    is_valid_transition,
)
from rdq_lab.agent.trainer import Agent, train, train_agent

__all__ = [
    "RUN_LOG_COLUMNS",
    "Agent",
    "AgentKind",
    "AgentMode",
    "Batch",
    "Decision",
    "EpisodeRecord",
    "EpsilonSchedule",
    "Experience",
    "LossReport",
    "ReplayBuffer",
    "RunLog",
    "TrainState",
    "act",
    "advance_mode",
    "build_teacher_policy",
    "combined_loss_and_grad",
    "detect_novelty",
    "is_valid_transition",
    "kl_enabled",
    "optimize_step",
    "read_run_log",
    "safe_mask",
    "sync_target",
    "teacher_from_policy",
    "train",
    "train_agent",
]
