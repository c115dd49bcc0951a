"""Novelty-level generator tests."""

import pytest

from rdq_lab.envs import generate_novelty_levels, is_solvable, novelty_kinds, reset
from rdq_lab.envs.frozenlake import default_layout
from rdq_lab.envs.novelty import flip_layout
from rdq_lab.errors import ConfigurationError


def test_kind_lists():
    assert set(novelty_kinds("frozenlake")) == {"shuffled_holes", "flipped_start_goal"}
    assert "super_fast" in novelty_kinds("crossroad")
    with pytest.raises(ConfigurationError):
        novelty_kinds("mars")


@pytest.mark.parametrize("kind", ["shuffled_holes", "flipped_start_goal"])
def test_frozenlake_levels_distinct_and_solvable(kind):
    levels = generate_novelty_levels("frozenlake", kind, 20, seed=4)
    assert len(levels) == 20
    assert len({level.layout_key() for level in levels}) == 20
    for i, level in enumerate(levels):
        assert level.level_index == i
        assert level.novelty_kind == kind
        assert level.frozenlake is not None
        assert is_solvable(level.frozenlake)
        reset(level)


def test_shuffled_holes_never_reproduce_baseline():
    base = default_layout()
    for level in generate_novelty_levels("frozenlake", "shuffled_holes", 20, seed=0):
        assert level.frozenlake is not None
        assert sorted(level.frozenlake.holes) != sorted(base.holes)
        assert len(level.frozenlake.holes) == len(base.holes)


def test_flip_moves_hole_under_new_goal():
    flipped = flip_layout(default_layout())
    assert flipped.start == (0, 3)
    assert flipped.goal == (3, 0)
    assert flipped.holes == ((1, 1), (1, 3), (2, 3), (3, 3))
    assert is_solvable(flipped)


def test_flipped_level_zero_is_noise_free():
    (level,) = generate_novelty_levels("frozenlake", "flipped_start_goal", 1, seed=123)
    assert level.frozenlake == flip_layout(default_layout())


def test_generation_is_seeded():
    a = generate_novelty_levels("crossroad", "random_speeds", 5, seed=9)
    b = generate_novelty_levels("crossroad", "random_speeds", 5, seed=9)
    assert a == b


@pytest.mark.parametrize(
    "kind, check",
    [
        ("super_fast", lambda car: abs(car.speed) == 3),
        ("all_left", lambda car: car.speed < 0),
        ("all_right", lambda car: car.speed > 0),
        ("super_slow", lambda car: abs(car.speed) == 1 and car.period == 2),
    ],
)
def test_crossroad_level_zero_kinds(kind, check):
    (level,) = generate_novelty_levels("crossroad", kind, 1, seed=1)
    assert level.crossroad is not None
    assert len(level.crossroad.cars) == 7
    assert all(check(car) for car in level.crossroad.cars)


def test_crossroad_opposite_negates_baseline():
    (level,) = generate_novelty_levels("crossroad", "opposite", 1, seed=1)
    assert level.crossroad is not None
    assert [car.speed for car in level.crossroad.cars] == [-1, 1, -2, 2, -1, 1, -2]


def test_crossroad_levels_are_playable():
    for level in generate_novelty_levels("crossroad", "shifted", 10, seed=2):
        state = reset(level)
        assert state.agent_pos == (10, 7)


def test_unknown_kind_and_bad_count():
    with pytest.raises(ConfigurationError, match="Unknown novelty kind"):
        generate_novelty_levels("frozenlake", "super_fast", 1, seed=0)
    with pytest.raises(ConfigurationError):
        generate_novelty_levels("frozenlake", "shuffled_holes", 0, seed=0)
