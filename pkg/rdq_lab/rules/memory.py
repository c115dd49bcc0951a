"""Failure memory and consistency sample.

The failure memory counts every (QSR state, action) pair that led to a
death. The consistency sample keeps the most recent non-failure pairs
so induction can reject rules that would forbid actions known to be
harmless.
"""

from __future__ import annotations

import json
import logging
import os
from collections import Counter, OrderedDict
from typing import Dict, Iterator, List, Sequence, Tuple

from rdq_lab.envs.types import Action
from rdq_lab.errors import ConfigurationError
from rdq_lab.qsr.encoder import QsrState, parse_atom
from rdq_lab.qsr.regions import QsrGranularity
from rdq_lab.rules.models import RuleSet

logger = logging.getLogger(__name__)

Example = Tuple[QsrState, Action]
ExampleKey = Tuple[Tuple[str, ...], int]

MEMORY_FORMAT_VERSION = 1


def example_key(s_qsr: QsrState, action: Action) -> ExampleKey:
    """Canonical key: relation atoms sorted by text, then the action id."""
    return (s_qsr.atoms(), action.id)


class FailureMemory:
    """Multiset of (QSR state, action) pairs that preceded a death."""

    def __init__(self) -> None:
        self._counts: Counter = Counter()
        self._examples: Dict[ExampleKey, Example] = {}

    def record(self, s_qsr: QsrState, action: Action, count: int = 1) -> None:
        key = example_key(s_qsr, action)
        self._examples.setdefault(key, (s_qsr, action))
        self._counts[key] += count

    def count(self, s_qsr: QsrState, action: Action) -> int:
        return self._counts.get(example_key(s_qsr, action), 0)

    def items(self) -> Iterator[Tuple[Example, int]]:
        for key in sorted(self._counts):
            yield self._examples[key], self._counts[key]

    def snapshot(self) -> "FailureMemory":
        copy = FailureMemory()
        copy._counts = Counter(self._counts)
        copy._examples = dict(self._examples)
        return copy

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    def __len__(self) -> int:
        return len(self._counts)


class ConsistencySample:
    """Most recent distinct non-failure pairs, bounded by *capacity*."""

    def __init__(self, capacity: int = 10_000) -> None:
        if capacity < 1:
            raise ConfigurationError(f"consistency capacity must be >= 1 (got {capacity})")
        self.capacity = capacity
        self._entries: "OrderedDict[ExampleKey, Example]" = OrderedDict()

    def add(self, s_qsr: QsrState, action: Action) -> None:
        key = example_key(s_qsr, action)
        if key in self._entries:
            self._entries.move_to_end(key)
            return
        self._entries[key] = (s_qsr, action)
        if len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def entries(self) -> List[Example]:
        return list(self._entries.values())

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, tuple) or len(item) != 2:
            return False
        return example_key(item[0], item[1]) in self._entries

    def __len__(self) -> int:
        return len(self._entries)


# ── Operations ───────────────────────────────────────────────────────────


def record_failure(mem: FailureMemory, s_qsr: QsrState, a: Action) -> FailureMemory:
    mem.record(s_qsr, a)
    return mem


def filter_outliers(mem: FailureMemory, min_support: int) -> List[Example]:
    """Examples seen at least *min_support* times, in canonical key order."""
    if min_support < 1:
        raise ConfigurationError(f"min_support must be >= 1 (got {min_support})")
    return [example for example, count in mem.items() if count >= min_support]


def clear(mem: FailureMemory, rs: RuleSet) -> Tuple[FailureMemory, RuleSet]:
    """Fresh, empty memory and rule set; the rule-set version still increases."""
    logger.info(
        "Clearing %d failure pair(s) and %d rule(s) (rule set v%d)",
        len(mem),
        len(rs),
        rs.version,
    )
    return FailureMemory(), rs.cleared()


# ── Persistence ──────────────────────────────────────────────────────────


def memory_to_dict(mem: FailureMemory, consistency: ConsistencySample) -> dict:
    return {
        "format_version": MEMORY_FORMAT_VERSION,
        "failures": [
            {"atoms": list(s.atoms()), "action": a.name, "count": count}
            for (s, a), count in mem.items()
        ],
        "consistency_capacity": consistency.capacity,
        "consistency": [
            {"atoms": list(s.atoms()), "action": a.name} for s, a in consistency.entries()
        ],
    }


def memory_from_dict(
    data: dict,
    g: QsrGranularity,
    actions: Sequence[Action],
) -> Tuple[FailureMemory, ConsistencySample]:
    if data.get("format_version") != MEMORY_FORMAT_VERSION:
        raise ConfigurationError(
            f"Unsupported failure-memory format version {data.get('format_version')!r}."
        )
    by_name = {a.name: a for a in actions}

    def _example(entry: dict) -> Example:
        try:
            action = by_name[entry["action"]]
        except KeyError:
            raise ConfigurationError(f"Unknown action '{entry.get('action')}' in memory.") from None
        return QsrState.of(parse_atom(atom, g) for atom in entry["atoms"]), action

    mem = FailureMemory()
    for entry in data.get("failures", []):
        s_qsr, action = _example(entry)
        mem.record(s_qsr, action, count=int(entry["count"]))
    consistency = ConsistencySample(int(data.get("consistency_capacity", 10_000)))
    for entry in data.get("consistency", []):
        consistency.add(*_example(entry))
    return mem, consistency


def save_memory(mem: FailureMemory, consistency: ConsistencySample, path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(memory_to_dict(mem, consistency), f, indent=1, sort_keys=True)
    logger.debug("Failure memory (%d pairs) written to %s", len(mem), path)


def load_memory(
    path: str,
    g: QsrGranularity,
    actions: Sequence[Action],
) -> Tuple[FailureMemory, ConsistencySample]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"Cannot read failure memory '{path}': {exc}") from exc
    return memory_from_dict(data, g, actions)
