"""Domain types for the gridworld simulators.

``GridState`` and ``StepOutcome`` are immutable value objects so any
state can be stepped repeatedly or shared between workers.
``LevelConfig`` is a pydantic model because it is also the on-disk level
file format.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rdq_lab.constants import (
    CROSSROAD,
    CROSSROAD_COLS,
    CROSSROAD_GOAL_ROW,
    CROSSROAD_MAX_SPEED,
    CROSSROAD_ROWS,
    CROSSROAD_START,
    DEFAULT_MAX_STEPS,
    DOMAINS,
    FROZENLAKE,
    FROZENLAKE_COLS,
    FROZENLAKE_GOAL,
    FROZENLAKE_HOLES,
    FROZENLAKE_ROWS,
    FROZENLAKE_START,
)

Cell = Tuple[int, int]

# Object type symbols; the set is open, post-novelty objects may add more.
AGENT = "agent"
CAR = "car"
HOLE = "hole"
GOAL = "goal"
WALL = "wall"
OBJECT_TYPES = (AGENT, CAR, HOLE, GOAL, WALL)


# ── Actions ──────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Action:
    """A discrete action with a dense integer id."""

    id: int
    name: str

    def __str__(self) -> str:
        return self.name


# (d_row, d_col) per action name; row 0 is the top of the grid.
ACTION_DELTAS: Dict[str, Cell] = {
    "up": (-1, 0),
    "down": (1, 0),
    "left": (0, -1),
    "right": (0, 1),
    "noop": (0, 0),
}

_DOMAIN_ACTION_NAMES: Dict[str, Tuple[str, ...]] = {
    FROZENLAKE: ("up", "down", "left", "right"),
    CROSSROAD: ("up", "down", "left", "right", "noop"),
}


def action_names(domain: str) -> Tuple[str, ...]:
    """Return the ordered action names of *domain*."""
    try:
        return _DOMAIN_ACTION_NAMES[domain]
    except KeyError:
        from rdq_lab.errors import ConfigurationError

        raise ConfigurationError(
            f"Unknown domain '{domain}'. Expected one of {list(DOMAINS)}."
        ) from None


# ── States ───────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class GridObject:
    """A non-agent object occupying exactly one cell.

    ``velocity`` is signed cells per move (positive moves right);
    ``period`` is the number of ticks between moves.
    """

    object_id: str
    object_type: str
    pos: Cell
    velocity: int = 0
    period: int = 1


@dataclass(frozen=True)
class GridState:
    """Ground-truth state of a gridworld episode."""

    domain: str
    agent_pos: Cell
    objects: Tuple[GridObject, ...]
    grid_dims: Tuple[int, int]
    tick: int = 0
    terminal: bool = False
    max_steps: int = DEFAULT_MAX_STEPS
    goal_row: Optional[int] = None

    def objects_at(self, cell: Cell) -> List[GridObject]:
        return [obj for obj in self.objects if obj.pos == cell]

    def cells_of(self, object_type: str) -> List[Cell]:
        return [obj.pos for obj in self.objects if obj.object_type == object_type]


@dataclass(frozen=True)
class StepOutcome:
    """Result of one transition.

    ``failure`` implies ``terminal``; ``truncated`` is set only when the
    episode hit ``max_steps`` without another terminal event.
    """

    next_state: GridState
    reward: float
    terminal: bool
    failure: bool = False
    truncated: bool = False
    info: Dict[str, object] = field(default_factory=dict, compare=False)


# ── Level files ──────────────────────────────────────────────────────────


class CarSpec(BaseModel):
    """One car: lane (row), initial column, signed speed and move period."""

    model_config = ConfigDict(frozen=True)

    lane: int = Field(ge=0, description="Grid row the car drives on.")
    column: int = Field(ge=0, description="Initial column.")
    speed: int = Field(description="Signed cells per move; positive drives right.")
    period: int = Field(default=1, ge=1, description="Ticks between moves.")

    @field_validator("speed")
    @classmethod
    def _validate_speed(cls, v: int) -> int:
        if v == 0 or abs(v) > CROSSROAD_MAX_SPEED:
            raise ValueError(f"speed must be non-zero with |speed| <= {CROSSROAD_MAX_SPEED}")
        return v

    @property
    def direction(self) -> str:
        return "right" if self.speed > 0 else "left"


class FrozenLakeLayout(BaseModel):
    """Start, goal and hole cells of a FrozenLake map."""

    model_config = ConfigDict(frozen=True)

    rows: int = Field(default=FROZENLAKE_ROWS, ge=2)
    cols: int = Field(default=FROZENLAKE_COLS, ge=2)
    start: Cell = FROZENLAKE_START
    goal: Cell = FROZENLAKE_GOAL
    holes: Tuple[Cell, ...] = FROZENLAKE_HOLES


class CrossroadLayout(BaseModel):
    """Grid size, start cell, goal row and the cars of a Crossroad level."""

    model_config = ConfigDict(frozen=True)

    rows: int = Field(default=CROSSROAD_ROWS, ge=3)
    cols: int = Field(default=CROSSROAD_COLS, ge=2)
    start: Cell = CROSSROAD_START
    goal_row: int = Field(default=CROSSROAD_GOAL_ROW, ge=0)
    cars: Tuple[CarSpec, ...] = ()


class LevelConfig(BaseModel):
    """Everything needed to reproduce a level.

    Exactly one of ``frozenlake`` / ``crossroad`` is set, matching
    ``domain``. The same config always produces the same episode dynamics.
    """

    model_config = ConfigDict(frozen=True)

    domain: str
    novelty_kind: str = "baseline"
    level_index: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0)
    max_steps: int = Field(default=DEFAULT_MAX_STEPS, ge=1)
    frozenlake: Optional[FrozenLakeLayout] = None
    crossroad: Optional[CrossroadLayout] = None

    @field_validator("domain")
    @classmethod
    def _validate_domain(cls, v: str) -> str:
        if v not in DOMAINS:
            raise ValueError(f"unknown domain '{v}', expected one of {list(DOMAINS)}")
        return v

    @model_validator(mode="after")
    def _layout_matches_domain(self) -> "LevelConfig":
        if self.domain == FROZENLAKE and (self.frozenlake is None or self.crossroad is not None):
            raise ValueError("a frozenlake level needs exactly the 'frozenlake' layout section")
        if self.domain == CROSSROAD and (self.crossroad is None or self.frozenlake is not None):
            raise ValueError("a crossroad level needs exactly the 'crossroad' layout section")
        return self

    def layout_key(self) -> Tuple:
        """Hashable identity of the layout, used to keep generated levels distinct."""
        if self.frozenlake is not None:
            fl = self.frozenlake
            return (fl.start, fl.goal, tuple(sorted(fl.holes)))
        assert self.crossroad is not None
        return tuple((c.lane, c.column, c.speed, c.period) for c in self.crossroad.cars)
