"""Safe ε-greedy action selection and teacher-policy construction."""

from __future__ import annotations

import logging
from typing import NamedTuple, Sequence

import numpy as np

from rdq_lab.envs.types import Action
from rdq_lab.errors import ShieldViolationError, UsageError
from rdq_lab.neural.losses import softmax
from rdq_lab.neural.mlp import MlpParams, forward
from rdq_lab.qsr.encoder import QsrState
from rdq_lab.rules.models import RuleSet
from rdq_lab.rules.shield import is_action_safe, safe_actions, select_random_safe_action

logger = logging.getLogger(__name__)

TEACHER_NORMALIZATIONS = ("safe", "renormalize")


class Decision(NamedTuple):
    action: Action
    overridden: bool


def act(
    online: MlpParams,
    s: np.ndarray,
    s_qsr: QsrState,
    epsilon: float,
    rules: RuleSet,
    actions: Sequence[Action],
    rng: np.random.Generator,
    *,
    shielded: bool = True,
) -> Decision:
    """Pick an action for state *s*.

    With probability *epsilon* a random action is drawn (a random *safe*
    one when *shielded*); otherwise the greedy action is taken. A greedy
    action that breaks a rule is replaced by a random safe action and
    reported as ``overridden``. Unshielded selection never consults the
    rules.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise UsageError(f"epsilon must lie in [0, 1] (got {epsilon})")
    if not actions:
        raise UsageError("act needs a non-empty action list.")

    overridden = False
    if rng.random() < epsilon:
        if shielded:
            chosen = select_random_safe_action(s_qsr, rules, actions, rng)
        else:
            chosen = actions[int(rng.integers(len(actions)))]
    else:
        chosen = actions[int(np.argmax(forward(online, s)))]
        if shielded and not is_action_safe(s_qsr, chosen, rules):
            chosen = select_random_safe_action(s_qsr, rules, actions, rng)
            overridden = True

    if shielded and len(rules):
        allowed = safe_actions(s_qsr, rules, actions)
        if allowed and chosen not in allowed:
            raise ShieldViolationError(chosen.name, [a.name for a in allowed])
    return Decision(chosen, overridden)


# ── Teacher policy ───────────────────────────────────────────────────────


def safe_mask(
    states: Sequence[QsrState],
    rules: RuleSet,
    actions: Sequence[Action],
) -> np.ndarray:
    """Boolean ``(n, |A|)`` matrix; entry is True when the action is safe in that state."""
    mask = np.ones((len(states), len(actions)), dtype=bool)
    if not len(rules):
        return mask
    for i, s_qsr in enumerate(states):
        for j, a in enumerate(actions):
            mask[i, j] = is_action_safe(s_qsr, a, rules)
    return mask


def teacher_from_policy(
    pi: np.ndarray,
    mask: np.ndarray,
    normalization: str = "safe",
) -> np.ndarray:
    """Move the probability of unsafe actions onto the safe ones.

    ``safe`` adds ``p_bad / |A_safe|`` to every safe action; ``renormalize``
    adds ``p_bad / |A_bad|`` and renormalizes. Rows with no safe action
    or no unsafe action are returned unchanged.
    """
    if normalization not in TEACHER_NORMALIZATIONS:
        raise UsageError(f"Unknown teacher normalization '{normalization}'.")
    pi = np.asarray(pi, dtype=np.float64)
    squeezed = pi.ndim == 1
    pi2 = pi[None, :] if squeezed else pi
    mask2 = np.asarray(mask, dtype=bool).reshape(pi2.shape)

    n_safe = mask2.sum(axis=1, keepdims=True)
    n_bad = mask2.shape[1] - n_safe
    p_bad = np.sum(np.where(mask2, 0.0, pi2), axis=1, keepdims=True)
    divisor = n_safe if normalization == "safe" else n_bad
    shifted = np.where(mask2, pi2 + p_bad / np.maximum(divisor, 1), 0.0)
    if normalization == "renormalize":
        total = np.sum(shifted, axis=1, keepdims=True)
        shifted = shifted / np.where(total > 0, total, 1.0)
    changed = (n_safe > 0) & (n_bad > 0)
    teacher = np.where(changed, shifted, pi2)
    return teacher[0] if squeezed else teacher


def build_teacher_policy(
    target: MlpParams,
    s: np.ndarray,
    s_qsr: QsrState,
    rules: RuleSet,
    actions: Sequence[Action],
    temperature: float = 1.0,
    normalization: str = "safe",
) -> np.ndarray:
    """Teacher distribution for one state from the target network and the rules."""
    if not actions:
        raise UsageError("build_teacher_policy needs a non-empty action list.")
    pi = softmax(forward(target, s), temperature)
    return teacher_from_policy(pi, safe_mask([s_qsr], rules, actions)[0], normalization)
