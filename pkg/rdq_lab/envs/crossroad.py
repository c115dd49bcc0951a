"""Crossroad: cross seven lanes of horizontally moving cars.

Per tick the cars move first (wrapping around the grid edge, a car with
``period`` p moves only on ticks divisible by p), then the agent moves
with border clamping. The agent dies iff its resulting cell holds a car.
"""

from __future__ import annotations

from typing import List

from rdq_lab.constants import (
    CROSSROAD,
    CROSSROAD_BASELINE_COLUMNS,
    CROSSROAD_BASELINE_SPEEDS,
    CROSSROAD_DEATH_REWARD,
    CROSSROAD_GOAL_REWARD,
    CROSSROAD_LANES,
    CROSSROAD_STEP_REWARD,
)
from rdq_lab.envs.types import (
    ACTION_DELTAS,
    CAR,
    Action,
    CarSpec,
    CrossroadLayout,
    GridObject,
    GridState,
    StepOutcome,
)
from rdq_lab.errors import ConfigurationError


def default_layout() -> CrossroadLayout:
    """Seven cars, one per lane, at the baseline speeds."""
    cars = tuple(
        CarSpec(lane=lane, column=col, speed=speed)
        for lane, col, speed in zip(
            CROSSROAD_LANES, CROSSROAD_BASELINE_COLUMNS, CROSSROAD_BASELINE_SPEEDS
        )
    )
    return CrossroadLayout(cars=cars)


def validate_layout(layout: CrossroadLayout) -> None:
    problems: List[str] = []
    start_row, start_col = layout.start
    if not (0 <= start_row < layout.rows and 0 <= start_col < layout.cols):
        problems.append(f"start {layout.start} is outside the {layout.rows}x{layout.cols} grid")
    if start_row == layout.goal_row:
        problems.append("start cell lies on the goal row")
    if layout.goal_row >= layout.rows:
        problems.append(f"goal row {layout.goal_row} is outside the grid")
    occupied = set()
    for car in layout.cars:
        cell = (car.lane, car.column)
        if car.lane >= layout.rows or car.column >= layout.cols:
            problems.append(f"car at {cell} is outside the grid")
        if car.lane == layout.goal_row:
            problems.append(f"car at {cell} drives on the goal row")
        if cell == tuple(layout.start):
            problems.append(f"start cell {cell} is occupied by a car")
        if cell in occupied:
            problems.append(f"two cars share cell {cell}")
        occupied.add(cell)
    if problems:
        raise ConfigurationError("Invalid Crossroad layout: " + "; ".join(problems))


def initial_state(layout: CrossroadLayout, max_steps: int) -> GridState:
    validate_layout(layout)
    objects = tuple(
        GridObject(
            object_id=f"car{i}",
            object_type=CAR,
            pos=(car.lane, car.column),
            velocity=car.speed,
            period=car.period,
        )
        for i, car in enumerate(layout.cars)
    )
    return GridState(
        domain=CROSSROAD,
        agent_pos=tuple(layout.start),
        objects=objects,
        grid_dims=(layout.rows, layout.cols),
        tick=0,
        max_steps=max_steps,
        goal_row=layout.goal_row,
    )


def move_cars(state: GridState) -> tuple:
    cols = state.grid_dims[1]
    moved = []
    for obj in state.objects:
        if obj.object_type == CAR and obj.velocity and state.tick % obj.period == 0:
            row, col = obj.pos
            obj = GridObject(
                object_id=obj.object_id,
                object_type=obj.object_type,
                pos=(row, (col + obj.velocity) % cols),
                velocity=obj.velocity,
                period=obj.period,
            )
        moved.append(obj)
    return tuple(moved)


def is_dead(state: GridState) -> bool:
    return state.agent_pos in state.cells_of(CAR)


def transition(state: GridState, action: Action) -> StepOutcome:
    rows, cols = state.grid_dims
    objects = move_cars(state)

    d_row, d_col = ACTION_DELTAS[action.name]
    row = min(max(state.agent_pos[0] + d_row, 0), rows - 1)
    col = min(max(state.agent_pos[1] + d_col, 0), cols - 1)
    pos = (row, col)

    failure = any(obj.pos == pos for obj in objects if obj.object_type == CAR)
    reached = not failure and row == state.goal_row
    tick = state.tick + 1
    truncated = not (failure or reached) and tick >= state.max_steps
    terminal = failure or reached or truncated

    if failure:
        reward = CROSSROAD_DEATH_REWARD
    elif reached:
        reward = CROSSROAD_GOAL_REWARD
    else:
        reward = CROSSROAD_STEP_REWARD

    next_state = GridState(
        domain=state.domain,
        agent_pos=pos,
        objects=objects,
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
