"""Novelty-level generators.

Each kind turns the baseline level into a family of distinct levels.
Level 0 of a kind is the noise-free base novelty; higher levels add
seeded noise (random car columns plus speed jitter on Crossroad, one
relocated hole on ``flipped_start_goal``). ``shuffled_holes`` is random
at every level.
"""

from __future__ import annotations

import logging
from typing import Callable, Dict, List, Sequence, Set, Tuple

import numpy as np

from rdq_lab.constants import (
    CROSSROAD,
    CROSSROAD_BASELINE_SPEEDS,
    CROSSROAD_MAX_SPEED,
    DEFAULT_MAX_STEPS,
    FROZENLAKE,
)
from rdq_lab.envs import crossroad, frozenlake
from rdq_lab.envs.types import CarSpec, Cell, CrossroadLayout, FrozenLakeLayout, LevelConfig
from rdq_lab.errors import ConfigurationError

logger = logging.getLogger(__name__)

CROSSROAD_KINDS = (
    "baseline",
    "super_slow",
    "super_fast",
    "random_speeds",
    "opposite",
    "all_left",
    "all_right",
    "shifted",
    "reversed",
)
FROZENLAKE_KINDS = ("shuffled_holes", "flipped_start_goal")

# Attempts per requested level before giving up on finding a new distinct one.
_MAX_ATTEMPTS_PER_LEVEL = 1_000


def novelty_kinds(domain: str) -> Tuple[str, ...]:
    if domain == CROSSROAD:
        return CROSSROAD_KINDS
    if domain == FROZENLAKE:
        return FROZENLAKE_KINDS
    raise ConfigurationError(f"Unknown domain '{domain}'.")


# ── Crossroad ────────────────────────────────────────────────────────────


def _random_speed(rng: np.random.Generator) -> int:
    magnitude = int(rng.integers(1, CROSSROAD_MAX_SPEED + 1))
    return magnitude if rng.random() < 0.5 else -magnitude


def _base_speeds(kind: str, rng: np.random.Generator) -> Tuple[List[int], int]:
    """Return (speeds per lane, move period) of the noise-free novelty."""
    base = list(CROSSROAD_BASELINE_SPEEDS)
    if kind == "baseline":
        return base, 1
    if kind == "super_slow":
        return [int(np.sign(s)) for s in base], 2
    if kind == "super_fast":
        return [int(np.sign(s)) * CROSSROAD_MAX_SPEED for s in base], 1
    if kind == "random_speeds":
        return [_random_speed(rng) for _ in base], 1
    if kind == "opposite":
        return [-s for s in base], 1
    if kind == "all_left":
        return [-abs(s) for s in base], 1
    if kind == "all_right":
        return [abs(s) for s in base], 1
    if kind == "shifted":
        return [int(s) for s in np.roll(base, 1)], 1
    if kind == "reversed":
        return base[::-1], 1
    raise ConfigurationError(f"Unknown crossroad novelty kind '{kind}'.")


def _jitter(speed: int, rng: np.random.Generator) -> int:
    """Add -1, 0 or +1 to the magnitude; clamp to 1..MAX, keep the sign."""
    magnitude = abs(speed) + int(rng.integers(-1, 2))
    magnitude = min(max(magnitude, 1), CROSSROAD_MAX_SPEED)
    return magnitude if speed > 0 else -magnitude


def _crossroad_layout(kind: str, level_index: int, rng: np.random.Generator) -> CrossroadLayout:
    base = crossroad.default_layout()
    speeds, period = _base_speeds(kind, rng)
    cars = []
    for car, speed in zip(base.cars, speeds):
        column = car.column
        if level_index > 0:
            column = int(rng.integers(0, base.cols))
            speed = _jitter(speed, rng)
        cars.append(CarSpec(lane=car.lane, column=column, speed=speed, period=period))
    return base.model_copy(update={"cars": tuple(cars)})


# ── FrozenLake ───────────────────────────────────────────────────────────


def _free_cells(layout: FrozenLakeLayout, exclude: Set[Cell]) -> List[Cell]:
    return [
        (r, c)
        for r in range(layout.rows)
        for c in range(layout.cols)
        if (r, c) not in exclude and (r, c) != layout.start and (r, c) != layout.goal
    ]


def _shuffled_holes(level_index: int, rng: np.random.Generator) -> FrozenLakeLayout:
    base = frozenlake.default_layout()
    cells = _free_cells(base, set())
    picks = rng.choice(len(cells), size=len(base.holes), replace=False)
    holes = tuple(sorted(cells[int(i)] for i in picks))
    return base.model_copy(update={"holes": holes})


def flip_layout(layout: FrozenLakeLayout) -> FrozenLakeLayout:
    """Mirror start and goal columns.

    A hole lying under the mirrored start or goal moves into the cell the
    start or goal vacated, so the hole count is preserved.
    """
    last = layout.cols - 1
    start = (layout.start[0], last - layout.start[1])
    goal = (layout.goal[0], last - layout.goal[1])
    vacated = {start: layout.start, goal: layout.goal}
    holes = []
    for hole in layout.holes:
        holes.append(vacated.get(hole, hole))
    return layout.model_copy(update={"start": start, "goal": goal, "holes": tuple(sorted(holes))})


def _flipped_start_goal(level_index: int, rng: np.random.Generator) -> FrozenLakeLayout:
    flipped = flip_layout(frozenlake.default_layout())
    if level_index == 0:
        return flipped
    holes = list(flipped.holes)
    moved = int(rng.integers(0, len(holes)))
    free = _free_cells(flipped, set(holes))
    holes[moved] = free[int(rng.integers(0, len(free)))]
    return flipped.model_copy(update={"holes": tuple(sorted(holes))})


_FROZENLAKE_GENERATORS: Dict[str, Callable[[int, np.random.Generator], FrozenLakeLayout]] = {
    "shuffled_holes": _shuffled_holes,
    "flipped_start_goal": _flipped_start_goal,
}


# ── Public API ───────────────────────────────────────────────────────────


def generate_novelty_levels(
    domain: str,
    novelty_kind: str,
    count: int,
    seed: int,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> List[LevelConfig]:
    """Generate *count* distinct levels realizing *novelty_kind*.

    FrozenLake layouts are flood-fill checked and redrawn when the goal is
    unreachable. Raises :class:`ConfigurationError` for unknown kinds or
    when the kind cannot supply *count* distinct levels.
    """
    if count < 1:
        raise ConfigurationError(f"count must be >= 1 (got {count}).")
    kinds: Sequence[str] = novelty_kinds(domain)
    if novelty_kind not in kinds:
        raise ConfigurationError(
            f"Unknown novelty kind '{novelty_kind}' for {domain}. Expected one of {list(kinds)}."
        )

    rng = np.random.default_rng(seed)
    levels: List[LevelConfig] = []
    seen: Set[tuple] = set()
    if novelty_kind == "shuffled_holes":
        # a shuffle that reproduces the baseline map is not a novelty
        seen.add(LevelConfig(domain=domain, frozenlake=frozenlake.default_layout()).layout_key())
    attempts = 0
    while len(levels) < count:
        attempts += 1
        if attempts > count * _MAX_ATTEMPTS_PER_LEVEL:
            raise ConfigurationError(
                f"Could only generate {len(levels)} distinct '{novelty_kind}' levels "
                f"out of {count} requested."
            )
        index = len(levels)
        if domain == FROZENLAKE:
            layout = _FROZENLAKE_GENERATORS[novelty_kind](index, rng)
            if not frozenlake.is_solvable(layout):
                continue
            level = LevelConfig(
                domain=domain,
                novelty_kind=novelty_kind,
                level_index=index,
                seed=seed + index,
                max_steps=max_steps,
                frozenlake=layout,
            )
        else:
            level = LevelConfig(
                domain=domain,
                novelty_kind=novelty_kind,
                level_index=index,
                seed=seed + index,
                max_steps=max_steps,
                crossroad=_crossroad_layout(novelty_kind, index, rng),
            )
        key = level.layout_key()
        if key in seen:
            continue
        seen.add(key)
        levels.append(level)

    logger.debug(
        "Generated %d %s/%s level(s) in %d attempt(s)", count, domain, novelty_kind, attempts
    )
    return levels
