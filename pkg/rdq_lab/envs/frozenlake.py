"""Deterministic (non-slippery) FrozenLake.

Movement is clamped at the border. Entering a hole ends the episode
with the internal death reward; entering the goal ends it with +1.
"""

from __future__ import annotations

from collections import deque
from typing import Set

from rdq_lab.constants import (
    FROZENLAKE,
    FROZENLAKE_DEATH_REWARD,
    FROZENLAKE_GOAL_REWARD,
    FROZENLAKE_STEP_REWARD,
)
from rdq_lab.envs.types import (
    ACTION_DELTAS,
    GOAL,
    HOLE,
    Action,
    Cell,
    FrozenLakeLayout,
    GridObject,
    GridState,
    StepOutcome,
)
from rdq_lab.errors import ConfigurationError


def default_layout() -> FrozenLakeLayout:
    """The standard 4x4 map: start top-left, goal bottom-right, four holes."""
    return FrozenLakeLayout()


def _in_bounds(cell: Cell, rows: int, cols: int) -> bool:
    return 0 <= cell[0] < rows and 0 <= cell[1] < cols


def validate_layout(layout: FrozenLakeLayout) -> None:
    """Raise :class:`ConfigurationError` if *layout* cannot be played."""
    problems = []
    for name, cell in (("start", layout.start), ("goal", layout.goal)):
        if not _in_bounds(cell, layout.rows, layout.cols):
            problems.append(f"{name} {cell} is outside the {layout.rows}x{layout.cols} grid")
    for hole in layout.holes:
        if not _in_bounds(hole, layout.rows, layout.cols):
            problems.append(f"hole {hole} is outside the grid")
    if layout.start == layout.goal:
        problems.append("start and goal share a cell")
    if layout.start in layout.holes:
        problems.append(f"start cell {layout.start} is occupied by a hole")
    if layout.goal in layout.holes:
        problems.append(f"goal cell {layout.goal} is occupied by a hole")
    if len(set(layout.holes)) != len(layout.holes):
        problems.append("duplicate hole cells")
    if problems:
        raise ConfigurationError("Invalid FrozenLake layout: " + "; ".join(problems))


def is_solvable(layout: FrozenLakeLayout) -> bool:
    """Flood fill from start; True if the goal is reachable without crossing a hole."""
    holes: Set[Cell] = set(layout.holes)
    if layout.start in holes:
        return False
    seen = {layout.start}
    frontier = deque([layout.start])
    while frontier:
        cell = frontier.popleft()
        if cell == layout.goal:
            return True
        for d_row, d_col in (ACTION_DELTAS[n] for n in ("up", "down", "left", "right")):
            nxt = (cell[0] + d_row, cell[1] + d_col)
            if nxt in seen or nxt in holes or not _in_bounds(nxt, layout.rows, layout.cols):
                continue
            seen.add(nxt)
            frontier.append(nxt)
    return False


def initial_state(layout: FrozenLakeLayout, max_steps: int) -> GridState:
    validate_layout(layout)
    objects = [
        GridObject(object_id=f"hole{i}", object_type=HOLE, pos=tuple(hole))
        for i, hole in enumerate(sorted(layout.holes))
    ]
    objects.append(GridObject(object_id="goal", object_type=GOAL, pos=tuple(layout.goal)))
    return GridState(
        domain=FROZENLAKE,
        agent_pos=tuple(layout.start),
        objects=tuple(objects),
        grid_dims=(layout.rows, layout.cols),
        tick=0,
        max_steps=max_steps,
    )


def is_dead(state: GridState) -> bool:
    return state.agent_pos in state.cells_of(HOLE)


def transition(state: GridState, action: Action) -> StepOutcome:
    rows, cols = state.grid_dims
    d_row, d_col = ACTION_DELTAS[action.name]
    row = min(max(state.agent_pos[0] + d_row, 0), rows - 1)
    col = min(max(state.agent_pos[1] + d_col, 0), cols - 1)
    pos = (row, col)

    failure = pos in state.cells_of(HOLE)
    reached = pos in state.cells_of(GOAL)
    tick = state.tick + 1
    truncated = not (failure or reached) and tick >= state.max_steps
    terminal = failure or reached or truncated

    if failure:
        reward = FROZENLAKE_DEATH_REWARD
    elif reached:
        reward = FROZENLAKE_GOAL_REWARD
    else:
        reward = FROZENLAKE_STEP_REWARD

    next_state = GridState(
        domain=state.domain,
        agent_pos=pos,
        objects=state.objects,
        grid_dims=state.grid_dims,
        tick=tick,
        terminal=terminal,
        max_steps=state.max_steps,
        goal_row=state.goal_row,
    )
    return StepOutcome(
        next_state=next_state,
        reward=reward,
        terminal=terminal,
        failure=failure,
        truncated=truncated,
        info={"goal_reached": reached},
    )
