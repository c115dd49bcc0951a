"""Qualitative spatial encoding tests."""

import math

import numpy as np
import pytest

from rdq_lab.envs import baseline_level, reset
from rdq_lab.envs.types import GOAL, HOLE, GridObject, GridState
from rdq_lab.errors import ConfigurationError, UsageError
from rdq_lab.qsr.encoder import QsrState, Relation, encode, parse_atom, relation_to_atom
from rdq_lab.qsr.regions import (
    QsrGranularity,
    band_of,
    region_by_name,
    region_of,
    region_table,
    sector_of,
    write_region_table,
)


def _state(agent, objects, dims=(5, 5)):
    return GridState(
        domain="frozenlake",
        agent_pos=agent,
        objects=tuple(
            GridObject(object_id=f"o{i}", object_type=kind, pos=pos)
            for i, (kind, pos) in enumerate(objects)
        ),
        grid_dims=dims,
    )


def test_region_table_names(granularity):
    names = [r.name for r in region_table(granularity)]
    assert len(names) == granularity.size == 16
    assert names[:4] == ["e_close", "e_far", "ne_close", "ne_far"]
    assert "s_close" in names and "nw_far" in names


@pytest.mark.parametrize(
    "dx, dy, expected",
    [
        (1, 0, "e_close"),
        (0, -1, "n_close"),
        (-1, 0, "w_close"),
        (0, 1, "s_close"),
        (1, 1, "se_close"),
        (-1, -1, "nw_close"),
        (2, 0, "e_far"),
        (2, -1, "ne_far"),
        (0, 2, "s_far"),
        (-2, 2, "sw_far"),
    ],
)
def test_region_of_offsets(granularity, dx, dy, expected):
    region = region_of(dx, dy, granularity)
    assert region is not None and region.name == expected


def test_offsets_outside_field_have_no_region(granularity):
    assert region_of(3, 0, granularity) is None
    assert region_of(-2, 3, granularity) is None


def test_zero_offset_is_undefined(granularity):
    with pytest.raises(UsageError):
        region_of(0, 0, granularity)


def test_partition_covers_field_exactly_once():
    for g in (QsrGranularity(4, 1, 1), QsrGranularity(8, 2, 2), QsrGranularity(16, 3, 4)):
        counts = {r.name: 0 for r in region_table(g)}
        for dx in range(-g.field_radius, g.field_radius + 1):
            for dy in range(-g.field_radius, g.field_radius + 1):
                if dx == 0 and dy == 0:
                    continue
                region = region_of(dx, dy, g)
                assert region is not None
                counts[region.name] += 1
        assert sum(counts.values()) == (2 * g.field_radius + 1) ** 2 - 1
        if g == QsrGranularity(8, 2, 2):
            assert all(counts.values())
            assert counts["e_far"] == 1 and counts["ne_far"] == 3


def test_sector_boundaries_fall_in_upper_cone():
    # With D=4 the diagonal (1, -1) lies exactly on the e/n boundary at 45 degrees.
    assert sector_of(1, -1, 4) == 1
    assert sector_of(-1, 1, 4) == 3
    # D=8 cone edges sit at odd multiples of 22.5 degrees; no offset within R=2 hits one.
    angles = [
        math.degrees(math.atan2(-dy, dx))
        for dx in range(-2, 3)
        for dy in range(-2, 3)
        if (dx, dy) != (0, 0)
    ]
    assert not any(np.isclose((a - 22.5) % 45, 0) for a in angles)


def test_band_of_splits_radius(granularity):
    assert [band_of(d, granularity) for d in (1, 2)] == [0, 1]
    g = QsrGranularity(8, 2, 4)
    assert [band_of(d, g) for d in (1, 2, 3, 4)] == [0, 0, 1, 1]


def _field(radius):
    return [
        (dx, dy)
        for dx in range(-radius, radius + 1)
        for dy in range(-radius, radius + 1)
        if (dx, dy) != (0, 0)
    ]


@pytest.mark.parametrize("directions", [4, 8, 16])
def test_quarter_turn_shifts_the_sector(directions):
    g = QsrGranularity(directions, 2, 3)
    for dx, dy in _field(g.field_radius):
        here = region_of(dx, dy, g)
        # (dx, dy) -> (dy, -dx) turns a quarter counterclockwise on screen
        turned = region_of(dy, -dx, g)
        assert turned.direction_index == (here.direction_index + directions // 4) % directions
        assert turned.band_index == here.band_index


@pytest.mark.parametrize(("coarse_bands", "fine_bands"), [(1, 2), (2, 4), (1, 3)])
def test_finer_bands_refine_coarser_atoms(coarse_bands, fine_bands):
    coarse = QsrGranularity(8, coarse_bands, 4)
    fine = QsrGranularity(8, fine_bands, 4)
    parent = {}
    for dx, dy in _field(4):
        c, f = region_of(dx, dy, coarse), region_of(dx, dy, fine)
        assert c.direction_index == f.direction_index
        parent.setdefault(f.name, set()).add(c.name)
    assert all(len(names) == 1 for names in parent.values())
    assert len(parent) == fine.size


def test_granularity_validation():
    with pytest.raises(ConfigurationError):
        QsrGranularity(directions=2)
    with pytest.raises(ConfigurationError):
        QsrGranularity(distance_bands=3, field_radius=2)


def test_encode_frozenlake_start(granularity):
    s = encode(reset(baseline_level("frozenlake")), granularity)
    # from (0, 0) only the hole at (1, 1) lies within radius 2
    assert s.atoms() == ("se_close(p, h)",)


def test_encode_merges_same_type_same_region(granularity):
    # offsets (2, -1), (1, -2) and (2, -2) all fall in the north-east far region
    state = _state((2, 2), [(HOLE, (1, 4)), (HOLE, (0, 3)), (HOLE, (0, 4)), (GOAL, (3, 2))])
    s = encode(state, granularity)
    assert s.atoms() == ("ne_far(p, h)", "s_close(p, g)")


def test_encode_skips_agent_cell_and_far_objects(granularity):
    state = _state((2, 2), [(HOLE, (2, 2)), (HOLE, (2, 4)), (HOLE, (2, 0)), (GOAL, (4, 4))])
    s = encode(state, granularity)
    assert s.atoms() == ("e_far(p, h)", "se_far(p, g)", "w_far(p, h)")
    empty = encode(_state((0, 0), [(HOLE, (4, 4))]), granularity)
    assert len(empty) == 0
    assert str(empty) == "{}"


def test_atom_round_trip(granularity):
    relation = parse_atom("n_close(p, c)", granularity)
    assert relation.object_type == "car"
    assert relation_to_atom(relation) == "n_close(p, c)"
    assert parse_atom("  n_close( p ,c ) ", granularity) == relation


@pytest.mark.parametrize(
    "text",
    ["n_close(h, p)", "n_close(p, p)", "n_close p h", "north(p, h)", "n_close(p)"],
)
def test_bad_atoms_rejected(granularity, text):
    with pytest.raises(UsageError):
        parse_atom(text, granularity)


def test_relation_cannot_target_agent(granularity):
    with pytest.raises(UsageError):
        Relation(region=region_by_name("n_close", granularity), object_type="agent")


def test_qsr_state_is_a_set(granularity):
    r = parse_atom("e_far(p, h)", granularity)
    s = QsrState.of([r, r])
    assert len(s) == 1 and r in s


def test_region_table_file(tmp_path, granularity):
    path = tmp_path / "regions.tsv"
    write_region_table(granularity, str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# Region symbols for D=8 K=2 R=2")
    assert sum(1 for line in lines if not line.startswith("#")) == 16
