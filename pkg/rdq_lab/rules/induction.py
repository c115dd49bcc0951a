"""Rule induction from recorded failures.

A bounded generate-and-test search followed by a greedy set cover:

1. Every subset of 1..max_body_len relations of every failure state,
   paired with the failure's action, is a candidate.
2. A candidate is *valid* when its false-positive rate on the
   consistency sample is within ``fp_tolerance`` and the failures it
   covers add up to at least ``min_support`` occurrences. The rate is
   the share of consistency entries whose state contains the body that
   also used the forbidden action without dying.
3. Valid candidates are picked greedily by (body length, atom text,
   action id) while any of them covers a failure not yet explained.
4. Rules whose failures are all covered by the remaining picks are dropped.

Failures no valid candidate covers are returned as unexplained.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from rdq_lab.errors import ConfigurationError
from rdq_lab.qsr.encoder import Relation
from rdq_lab.rules.memory import ConsistencySample, Example, FailureMemory, filter_outliers
from rdq_lab.rules.models import Rule

logger = logging.getLogger(__name__)

Body = FrozenSet[Relation]
Candidate = Tuple[Body, int]  # (body, action id)


@dataclass
class InductionResult:
    """Rules found plus the failures they could not explain."""

    rules: List[Rule] = field(default_factory=list)
    unexplained: List[Example] = field(default_factory=list)
    candidates_tested: int = 0


class _ExampleIndex:
    """Inverted index relation -> example ids, for fast body matching."""

    def __init__(self, examples: Iterable[Example]) -> None:
        self.examples = list(examples)
        self._by_relation: Dict[Relation, Set[int]] = {}
        self._by_action: Dict[int, Set[int]] = {}
        for idx, (s_qsr, action) in enumerate(self.examples):
            self._by_action.setdefault(action.id, set()).add(idx)
            for relation in s_qsr.relations:
                self._by_relation.setdefault(relation, set()).add(idx)

    def matching(self, body: Body) -> Set[int]:
        """Ids of examples whose state contains every relation of *body*."""
        result: Set[int] | None = None
        for relation in sorted(body, key=lambda r: len(self._by_relation.get(r, ()))):
            ids = self._by_relation.get(relation, set())
            result = set(ids) if result is None else result & ids
            if not result:
                return set()
        return result or set()

    def with_action(self, ids: Set[int], action_id: int) -> Set[int]:
        return ids & self._by_action.get(action_id, set())


def _body_text(body: Body) -> str:
    return ", ".join(sorted(r.atom for r in body))


def induce_rules(
    positives: List[Example],
    consistency: ConsistencySample,
    max_body_len: int = 2,
    fp_tolerance: float = 0.0,
    *,
    counts: Optional[Sequence[int]] = None,
    min_support: int = 1,
) -> InductionResult:
    """Explain *positives* with short, consistent rules.

    Parameters
    ----------
    positives:
        Distinct failure examples.
    consistency:
        Recent non-failure pairs used to reject over-general bodies.
    max_body_len:
        Largest body considered.
    fp_tolerance:
        Largest allowed false-positive rate, in ``[0, 1]``.
    counts:
        Times each positive was seen; all ones when omitted.
    min_support:
        Least total count a rule's covered failures must reach.
    """
    if max_body_len < 1:
        raise ConfigurationError(f"max_body_len must be >= 1 (got {max_body_len})")
    if not 0.0 <= fp_tolerance <= 1.0:
        raise ConfigurationError(f"fp_tolerance must lie in [0, 1] (got {fp_tolerance})")
    if min_support < 1:
        raise ConfigurationError(f"min_support must be >= 1 (got {min_support})")
    if counts is None:
        counts = [1] * len(positives)
    elif len(counts) != len(positives):
        raise ConfigurationError(
            f"counts has {len(counts)} entries for {len(positives)} positive(s)"
        )
    if not positives:
        return InductionResult()

    actions = {a.id: a for _, a in positives}
    pos_index = _ExampleIndex(positives)
    neg_index = _ExampleIndex(consistency.entries())

    # ── Generate ──
    candidates: Set[Candidate] = set()
    for s_qsr, action in positives:
        relations = sorted(s_qsr.relations)
        for size in range(1, min(max_body_len, len(relations)) + 1):
            for body in combinations(relations, size):
                candidates.add((frozenset(body), action.id))

    # ── Test ──
    coverage: Dict[Candidate, FrozenSet[int]] = {}
    for body, action_id in candidates:
        matches = neg_index.matching(body)
        false_pos = len(neg_index.with_action(matches, action_id))
        if false_pos > fp_tolerance * len(matches):
            continue
        covered = pos_index.with_action(pos_index.matching(body), action_id)
        if sum(counts[i] for i in covered) < min_support:
            continue
        coverage[(body, action_id)] = frozenset(covered)

    # ── Greedy cover ──
    uncovered: Set[int] = set(range(len(positives)))
    chosen: List[Candidate] = []
    while uncovered:
        best = None
        best_key = None
        for cand, covered in coverage.items():
            if not covered & uncovered:
                continue
            key = (len(cand[0]), _body_text(cand[0]), cand[1])
            if best_key is None or key < best_key:
                best, best_key = cand, key
        if best is None:
            break
        chosen.append(best)
        uncovered -= coverage[best]

    # ── Drop redundant picks, last chosen first ──
    kept = list(chosen)
    for cand in reversed(chosen):
        others: Set[int] = set()
        for other in kept:
            if other != cand:
                others |= coverage[other]
        if coverage[cand] <= others:
            kept.remove(cand)

    rules = sorted(
        (Rule(body=body, forbidden_action=actions[action_id]) for body, action_id in kept),
        key=Rule.sort_key,
    )
    unexplained = [positives[i] for i in sorted(uncovered)]
    if unexplained:
        logger.info(
            "%d failure example(s) left without a consistent, supported rule", len(unexplained)
        )
    logger.debug(
        "Induction: %d positive(s), %d consistency entr(ies), %d candidate(s) -> %d rule(s)",
        len(positives),
        len(consistency),
        len(candidates),
        len(rules),
    )
    return InductionResult(rules=rules, unexplained=unexplained, candidates_tested=len(candidates))


def induce_from_memory(
    mem: FailureMemory,
    consistency: ConsistencySample,
    *,
    min_support: int,
    support: str = "body",
    max_body_len: int = 2,
    fp_tolerance: float = 0.0,
) -> Tuple[List[Example], InductionResult]:
    """Run induction over a failure memory under one support policy.

    ``"state"`` keeps only examples seen ``min_support`` times each and
    lets any rule covering them stand. ``"body"`` keeps every example and
    asks instead that the failures a rule covers reach ``min_support``
    together. Returns the positives searched and the induction result.
    """
    if support == "state":
        positives = filter_outliers(mem, min_support)
        return positives, induce_rules(positives, consistency, max_body_len, fp_tolerance)
    if support != "body":
        raise ConfigurationError(f"support must be 'body' or 'state' (got {support!r})")
    items = list(mem.items())
    positives = [example for example, _ in items]
    result = induce_rules(
        positives,
        consistency,
        max_body_len,
        fp_tolerance,
        counts=[count for _, count in items],
        min_support=min_support,
    )
    return positives, result
