"""Rule and RuleSet value types.

A rule ``unsafe(a) :- r1, ..., rm`` says: when every relation of the
body holds in the current QSR state, action ``a`` leads to failure.
Both types are immutable; a RuleSet update produces a new RuleSet with
a higher version.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Tuple

from rdq_lab.envs.types import Action
from rdq_lab.errors import UsageError
from rdq_lab.qsr.encoder import QsrState, Relation


@dataclass(frozen=True)
class Rule:
    body: FrozenSet[Relation]
    forbidden_action: Action

    def __post_init__(self) -> None:
        if not self.body:
            raise UsageError("A rule body needs at least one relation.")

    @property
    def atoms(self) -> Tuple[str, ...]:
        return tuple(sorted(r.atom for r in self.body))

    @property
    def body_text(self) -> str:
        return ", ".join(self.atoms)

    def sort_key(self) -> Tuple[str, str]:
        return (self.forbidden_action.name, self.body_text)

    def matches(self, s_qsr: QsrState) -> bool:
        return self.body <= s_qsr.relations

    def covers(self, s_qsr: QsrState, action: Action) -> bool:
        return action == self.forbidden_action and self.matches(s_qsr)

    def __str__(self) -> str:
        return f"unsafe({self.forbidden_action.name}) :- {self.body_text}."


@dataclass(frozen=True)
class RuleSet:
    """Canonically ordered, duplicate-free collection of rules."""

    rules: Tuple[Rule, ...] = ()
    version: int = 0
    _by_action: Dict[int, List[FrozenSet[Relation]]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        canonical = tuple(sorted(set(self.rules), key=Rule.sort_key))
        object.__setattr__(self, "rules", canonical)
        for rule in canonical:
            self._by_action.setdefault(rule.forbidden_action.id, []).append(rule.body)

    @classmethod
    def of(cls, rules: Iterable[Rule], version: int = 0) -> "RuleSet":
        return cls(tuple(rules), version)

    def evolve(self, rules: Iterable[Rule]) -> "RuleSet":
        """Replace the rules, bumping the version."""
        return RuleSet(tuple(rules), self.version + 1)

    def cleared(self) -> "RuleSet":
        return RuleSet((), self.version + 1)

    def bodies_for(self, action: Action) -> List[FrozenSet[Relation]]:
        return self._by_action.get(action.id, [])

    def violated_by(self, s_qsr: QsrState, action: Action) -> List[Rule]:
        return [rule for rule in self.rules if rule.covers(s_qsr, action)]

    @cached_property
    def schemas(self) -> FrozenSet[Tuple[str, str]]:
        """(action name, body text) pairs; independent of version."""
        return frozenset(rule.sort_key() for rule in self.rules)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __contains__(self, item: object) -> bool:
        return item in self.rules


# ── Human-readable descriptions ─────────────────────────────────────────

_COMPASS = {"n": "north", "s": "south", "e": "east", "w": "west"}
_GENERIC_DIRECTION = re.compile(r"^d(\d+)$")
_GENERIC_BAND = re.compile(r"^b(\d+)$")


def _direction_words(code: str) -> str:
    generic = _GENERIC_DIRECTION.match(code)
    if generic:
        return f"direction {generic.group(1)}"
    if len(code) == 3:
        return f"{_COMPASS[code[0]]}-{_direction_words(code[1:])}"
    return "".join(_COMPASS[ch] for ch in code)


def describe_relation(relation: Relation) -> str:
    direction, _, band = relation.region.name.partition("_")
    text = f"{relation.object_type} {_direction_words(direction)}"
    if band:
        generic = _GENERIC_BAND.match(band)
        text += f" band {generic.group(1)}" if generic else f" {band}"
    return text


def describe_rule(rule: Rule) -> str:
    """E.g. ``not up: car north close``."""
    parts = [describe_relation(r) for r in sorted(rule.body)]
    return f"not {rule.forbidden_action.name}: " + " and ".join(parts)
