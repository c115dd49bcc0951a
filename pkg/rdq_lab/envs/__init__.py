"""Deterministic gridworld simulators and novelty-level generators."""

from rdq_lab.envs.core import (
    baseline_level,
    death_predicate,
    enumerate_actions,
    reset,
    state_size,
    step,
    vectorize,
)
from rdq_lab.envs.frozenlake import is_solvable
from rdq_lab.envs.gym_env import LabEnv
from rdq_lab.envs.novelty import generate_novelty_levels, novelty_kinds
from rdq_lab.envs.types import (
    Action,
    CarSpec,
    CrossroadLayout,
    FrozenLakeLayout,
    GridObject,
    GridState,
    LevelConfig,
    StepOutcome,
)

__all__ = [
    "Action",
    "CarSpec",
    "CrossroadLayout",
    "FrozenLakeLayout",
    "GridObject",
    "GridState",
    "LabEnv",
    "LevelConfig",
    "StepOutcome",
    "baseline_level",
    "death_predicate",
    "enumerate_actions",
    "generate_novelty_levels",
    "is_solvable",
    "novelty_kinds",
    "reset",
    "state_size",
    "step",
    "vectorize",
]
