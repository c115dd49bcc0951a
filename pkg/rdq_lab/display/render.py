"""ASCII frames for the ``render`` debug flag."""

from __future__ import annotations

from rdq_lab.constants import CROSSROAD
from rdq_lab.envs.types import CAR, GOAL, HOLE, GridState

_SYMBOLS = {HOLE: "H", GOAL: "G"}


def render_state(state: GridState) -> str:
    """Return a multi-line picture of *state*.

    ``P`` agent, ``H`` hole, ``G`` goal, ``>``/``<`` car by direction,
    ``=`` goal row, ``X`` agent on a hole or car.
    """
    rows, cols = state.grid_dims
    grid = [["." for _ in range(cols)] for _ in range(rows)]
    if state.domain == CROSSROAD and state.goal_row is not None:
        grid[state.goal_row] = ["=" for _ in range(cols)]
    for obj in state.objects:
        row, col = obj.pos
        if obj.object_type == CAR:
            grid[row][col] = ">" if obj.velocity > 0 else "<"
        else:
            grid[row][col] = _SYMBOLS.get(obj.object_type, obj.object_type[:1].upper())
    a_row, a_col = state.agent_pos
    grid[a_row][a_col] = "X" if grid[a_row][a_col] in ("H", ">", "<") else "P"
    header = f"tick {state.tick}" + (" (terminal)" if state.terminal else "")
    return "\n".join([header] + ["".join(line) for line in grid])
