"""Domain-independent entry points over the two simulators.

``reset`` and ``step`` are pure functions: the same ``LevelConfig`` and
action sequence always produce the same trace.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, List

import numpy as np

from rdq_lab.constants import CROSSROAD, CROSSROAD_MAX_SPEED, FROZENLAKE
from rdq_lab.envs import crossroad, frozenlake
from rdq_lab.envs.types import (
    CAR,
    GOAL,
    HOLE,
    Action,
    GridState,
    LevelConfig,
    StepOutcome,
    action_names,
)
from rdq_lab.errors import ConfigurationError, UsageError

logger = logging.getLogger(__name__)

_TRANSITIONS: Dict[str, Callable[[GridState, Action], StepOutcome]] = {
    FROZENLAKE: frozenlake.transition,
    CROSSROAD: crossroad.transition,
}

_DEATH_CHECKS: Dict[str, Callable[[GridState], bool]] = {
    FROZENLAKE: frozenlake.is_dead,
    CROSSROAD: crossroad.is_dead,
}

# Channels of the ground-truth state vector, per domain.
_CHANNELS: Dict[str, tuple] = {
    FROZENLAKE: ("agent", HOLE, GOAL),
    CROSSROAD: ("agent", CAR, "velocity"),
}


def enumerate_actions(domain: str) -> List[Action]:
    """Dense, stable action list: up, down, left, right (+ noop on Crossroad)."""
    return [Action(id=i, name=name) for i, name in enumerate(action_names(domain))]


def baseline_level(domain: str, max_steps: int | None = None) -> LevelConfig:
    """The un-modified level every agent pre-trains on."""
    extra = {} if max_steps is None else {"max_steps": max_steps}
    if domain == FROZENLAKE:
        return LevelConfig(domain=domain, frozenlake=frozenlake.default_layout(), **extra)
    if domain == CROSSROAD:
        return LevelConfig(domain=domain, crossroad=crossroad.default_layout(), **extra)
    raise ConfigurationError(f"Unknown domain '{domain}'.")


def reset(config: LevelConfig) -> GridState:
    """Return the initial state of *config* (tick 0, agent on the start cell)."""
    logger.debug(
        "Reset %s level %d (%s, seed=%d)",
        config.domain,
        config.level_index,
        config.novelty_kind,
        config.seed,
    )
    if config.domain == FROZENLAKE:
        assert config.frozenlake is not None
        return frozenlake.initial_state(config.frozenlake, config.max_steps)
    assert config.crossroad is not None
    return crossroad.initial_state(config.crossroad, config.max_steps)


def step(state: GridState, action: Action) -> StepOutcome:
    """Advance *state* by one deterministic transition."""
    if state.terminal:
        raise UsageError(f"Cannot step a terminal state (tick {state.tick}).")
    valid = action_names(state.domain)
    if action.name not in valid or valid.index(action.name) != action.id:
        raise UsageError(f"Action {action!r} is not in the {state.domain} action set {valid}.")
    return _TRANSITIONS[state.domain](state, action)


def death_predicate(state: GridState) -> bool:
    """Independent failure check: agent in a hole or on a car."""
    return _DEATH_CHECKS[state.domain](state)


# ── State vectors ────────────────────────────────────────────────────────


def state_size(domain: str, grid_dims: tuple) -> int:
    rows, cols = grid_dims
    return len(_CHANNELS[domain]) * rows * cols


def vectorize(state: GridState) -> np.ndarray:
    """Flatten *state* into stacked one-hot channels.

    FrozenLake channels are agent, hole, goal. Crossroad channels are
    agent, car and car velocity scaled into [-1, 1]. The size depends
    only on the domain and grid dimensions.
    """
    rows, cols = state.grid_dims
    planes = np.zeros((len(_CHANNELS[state.domain]), rows, cols), dtype=np.float64)
    planes[0, state.agent_pos[0], state.agent_pos[1]] = 1.0
    for obj in state.objects:
        row, col = obj.pos
        if state.domain == FROZENLAKE:
            if obj.object_type == HOLE:
                planes[1, row, col] = 1.0
            elif obj.object_type == GOAL:
                planes[2, row, col] = 1.0
        elif obj.object_type == CAR:
            planes[1, row, col] = 1.0
            planes[2, row, col] = obj.velocity / CROSSROAD_MAX_SPEED
    return planes.reshape(-1)
