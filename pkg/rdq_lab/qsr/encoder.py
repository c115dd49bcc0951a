"""Relations between the agent and the objects in its observation field."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, Tuple

from rdq_lab.envs.types import AGENT, CAR, GOAL, HOLE, WALL, GridState
from rdq_lab.errors import UsageError
from rdq_lab.qsr.regions import QsrGranularity, RegionSymbol, region_by_name, region_of

# Short codes used in atoms; object types without a code use their own name.
OBJECT_CODES: Dict[str, str] = {AGENT: "p", CAR: "c", HOLE: "h", GOAL: "g", WALL: "w"}
_CODE_TYPES: Dict[str, str] = {code: name for name, code in OBJECT_CODES.items()}

_ATOM_RE = re.compile(r"^\s*([a-z0-9_]+)\(\s*([a-z0-9_]+)\s*,\s*([a-z0-9_]+)\s*\)\s*$")


def object_code(object_type: str) -> str:
    return OBJECT_CODES.get(object_type, object_type)


def object_type_of(code: str) -> str:
    return _CODE_TYPES.get(code, code)


@dataclass(frozen=True, order=True)
class Relation:
    """``region(subject, object)``; the subject is always the agent."""

    atom: str = field(init=False, repr=False, compare=True)
    region: RegionSymbol = field(compare=False)
    object_type: str = field(compare=False)
    subject: str = field(default=AGENT, compare=False)

    def __post_init__(self) -> None:
        if self.object_type == AGENT:
            raise UsageError("A relation cannot point from the agent to itself.")
        atom = f"{self.region.name}({object_code(self.subject)}, {object_code(self.object_type)})"
        object.__setattr__(self, "atom", atom)


def relation_to_atom(r: Relation) -> str:
    """Canonical text form, e.g. ``n_close(p, c)``."""
    return r.atom


def parse_atom(text: str, g: QsrGranularity) -> Relation:
    """Inverse of :func:`relation_to_atom`; raises :class:`UsageError` on bad input."""
    match = _ATOM_RE.match(text)
    if match is None:
        raise UsageError(f"Malformed atom '{text.strip()}' (expected 'region(p, object)').")
    region_txt, subject_code, object_txt = match.groups()
    if object_type_of(subject_code) != AGENT:
        raise UsageError(f"Atom '{text.strip()}' must have the agent 'p' as its subject.")
    object_type = object_type_of(object_txt)
    if object_type == AGENT:
        raise UsageError(f"Atom '{text.strip()}' relates the agent to itself.")
    return Relation(region=region_by_name(region_txt, g), object_type=object_type)


@dataclass(frozen=True)
class QsrState:
    """Set of relations observed in one state. Empty when the field is empty."""

    relations: FrozenSet[Relation] = frozenset()

    @classmethod
    def of(cls, relations: Iterable[Relation]) -> "QsrState":
        return cls(frozenset(relations))

    def atoms(self) -> Tuple[str, ...]:
        """Atom texts in canonical (sorted) order."""
        return tuple(sorted(r.atom for r in self.relations))

    def __iter__(self) -> Iterator[Relation]:
        return iter(sorted(self.relations))

    def __len__(self) -> int:
        return len(self.relations)

    def __contains__(self, item: object) -> bool:
        return item in self.relations

    def __str__(self) -> str:
        return "{" + ", ".join(self.atoms()) + "}"


def encode(state: GridState, g: QsrGranularity) -> QsrState:
    """One relation per in-field object type and region.

    Objects sharing the agent's cell are skipped: that is a death or goal
    event, not a spatial relation.
    """
    a_row, a_col = state.agent_pos
    relations = set()
    for obj in state.objects:
        dy = obj.pos[0] - a_row
        dx = obj.pos[1] - a_col
        if dx == 0 and dy == 0:
            continue
        region = region_of(dx, dy, g)
        if region is not None:
            relations.add(Relation(region=region, object_type=obj.object_type))
    return QsrState(frozenset(relations))
