"""Cone-direction x distance-ring partition of the observation field.

Direction sector 0 is centred on east and sectors run counterclockwise;
each cone has half-width pi/D and is half-open (inclusive lower angle).
Distance is the Chebyshev distance, split into K equal bands over
``1..field_radius``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from rdq_lab.config.schema import QsrConfig
from rdq_lab.errors import ConfigurationError, UsageError

# Absorbs float error so offsets on a cone boundary land in the upper cone.
_BOUNDARY_EPS = 1e-9

_DIRECTION_NAMES: Dict[int, Tuple[str, ...]] = {
    4: ("e", "n", "w", "s"),
    8: ("e", "ne", "n", "nw", "w", "sw", "s", "se"),
    16: (
        "e", "ene", "ne", "nne", "n", "nnw", "nw", "wnw",
        "w", "wsw", "sw", "ssw", "s", "sse", "se", "ese",
    ),
}  # fmt: skip

_BAND_NAMES: Dict[int, Tuple[str, ...]] = {
    1: ("",),
    2: ("close", "far"),
    3: ("close", "mid", "far"),
}


@dataclass(frozen=True)
class QsrGranularity:
    """D direction cones x K distance bands over a square field of half-width R."""

    directions: int = 8
    distance_bands: int = 2
    field_radius: int = 2

    def __post_init__(self) -> None:
        if self.directions < 4:
            raise ConfigurationError(f"directions must be >= 4 (got {self.directions})")
        if self.distance_bands < 1:
            raise ConfigurationError(f"distance_bands must be >= 1 (got {self.distance_bands})")
        if self.field_radius < 1:
            raise ConfigurationError(f"field_radius must be >= 1 (got {self.field_radius})")
        if self.distance_bands > self.field_radius:
            raise ConfigurationError(
                f"distance_bands ({self.distance_bands}) cannot exceed "
                f"field_radius ({self.field_radius})"
            )

    @property
    def size(self) -> int:
        return self.directions * self.distance_bands

    @classmethod
    def from_config(cls, cfg: QsrConfig) -> "QsrGranularity":
        return cls(
            directions=cfg.directions,
            distance_bands=cfg.distance_bands,
            field_radius=cfg.field_radius,
        )

    def describe(self) -> str:
        return f"D={self.directions} K={self.distance_bands} R={self.field_radius}"


@dataclass(frozen=True)
class RegionSymbol:
    direction_index: int
    band_index: int
    name: str


def direction_name(index: int, directions: int) -> str:
    names = _DIRECTION_NAMES.get(directions)
    return names[index] if names else f"d{index}"


def band_name(index: int, bands: int) -> str:
    names = _BAND_NAMES.get(bands)
    return names[index] if names else f"b{index}"


def region_name(direction_index: int, band_index: int, g: QsrGranularity) -> str:
    d_name = direction_name(direction_index, g.directions)
    b_name = band_name(band_index, g.distance_bands)
    return f"{d_name}_{b_name}" if b_name else d_name


@lru_cache(maxsize=None)
def region_table(g: QsrGranularity) -> Tuple[RegionSymbol, ...]:
    """All D x K regions, ordered by (direction, band)."""
    return tuple(
        RegionSymbol(d, k, region_name(d, k, g))
        for d in range(g.directions)
        for k in range(g.distance_bands)
    )


@lru_cache(maxsize=None)
def _regions_by_name(g: QsrGranularity) -> Dict[str, RegionSymbol]:
    return {region.name: region for region in region_table(g)}


def region_by_name(name: str, g: QsrGranularity) -> RegionSymbol:
    try:
        return _regions_by_name(g)[name]
    except KeyError:
        raise UsageError(
            f"Unknown region symbol '{name}' for granularity {g.describe()}."
        ) from None


def sector_of(dx: int, dy: int, directions: int) -> int:
    """Cone index of the offset (dx right, dy down)."""
    angle = math.atan2(-dy, dx)
    width = 2 * math.pi / directions
    shifted = (angle + width / 2) % (2 * math.pi)
    return int(math.floor(shifted / width + _BOUNDARY_EPS)) % directions


def band_of(distance: int, g: QsrGranularity) -> int:
    band = ((distance - 1) * g.distance_bands) // g.field_radius
    return min(max(band, 0), g.distance_bands - 1)


def region_of(dx: int, dy: int, g: QsrGranularity) -> Optional[RegionSymbol]:
    """Region containing the offset, or ``None`` outside the observation field.

    Raises :class:`UsageError` for the zero offset: an object on the
    agent's cell is a collision, not a spatial relation.
    """
    if dx == 0 and dy == 0:
        raise UsageError("region_of is undefined for the zero offset (0, 0).")
    distance = max(abs(dx), abs(dy))
    if distance > g.field_radius:
        return None
    d = sector_of(dx, dy, g.directions)
    k = band_of(distance, g)
    return region_table(g)[d * g.distance_bands + k]


def write_region_table(g: QsrGranularity, path: str) -> None:
    """Write the naming table used by rule files as a reference text file."""
    width = 360.0 / g.directions
    lines: List[str] = [
        f"# Region symbols for {g.describe()} ({g.size} regions)",
        "# name\tdirection\tband\tcone_degrees\tchebyshev_range",
    ]
    for region in region_table(g):
        centre = region.direction_index * width
        lo_deg = (centre - width / 2) % 360
        hi_deg = (centre + width / 2) % 360
        lo_dist = 1 + math.ceil(region.band_index * g.field_radius / g.distance_bands)
        hi_dist = math.ceil((region.band_index + 1) * g.field_radius / g.distance_bands)
        lines.append(
            f"{region.name}\t{region.direction_index}\t{region.band_index}\t"
            f"[{lo_deg:g}, {hi_deg:g})\t{lo_dist}..{hi_dist}"
        )
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
