"""Safety queries against a RuleSet."""

from __future__ import annotations

from typing import List, Sequence

import numpy as np

from rdq_lab.envs.types import Action
from rdq_lab.errors import UsageError
from rdq_lab.qsr.encoder import QsrState
from rdq_lab.rules.models import RuleSet


def is_action_safe(s_qsr: QsrState, a: Action, rs: RuleSet) -> bool:
    """False iff some rule forbids *a* and its body holds in *s_qsr*."""
    relations = s_qsr.relations
    return not any(body <= relations for body in rs.bodies_for(a))


def safe_actions(s_qsr: QsrState, rs: RuleSet, actions: Sequence[Action]) -> List[Action]:
    """Actions of *actions* no rule forbids, in their original order."""
    if not actions:
        raise UsageError("safe_actions needs a non-empty action list.")
    return [a for a in actions if is_action_safe(s_qsr, a, rs)]


def select_random_safe_action(
    s_qsr: QsrState,
    rs: RuleSet,
    actions: Sequence[Action],
    rng: np.random.Generator,
) -> Action:
    """Uniform over the safe actions, or over all actions when none is safe."""
    pool = safe_actions(s_qsr, rs, actions) or list(actions)
    return pool[int(rng.integers(len(pool)))]
