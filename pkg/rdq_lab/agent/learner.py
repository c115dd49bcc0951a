"""Combined TD + KL loss, the optimizer step and target-network sync.

The loss for a batch of ``n`` transitions is::

    q_loss  = mean(ℓ(Q(s, a; θ) - y)),   y = r + γ max Q(s', ·; θ⁻) (r if terminal)
    kl_loss = mean(KL(softmax(Q(s, ·; θ)/τ) ‖ teacher(s)))
    total   = q_loss + λ · kl_loss

``combined_loss_and_grad`` is pure so gradient checks can call it with
perturbed parameters.
"""

from __future__ import annotations

import logging
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from rdq_lab.agent.policy import safe_mask, teacher_from_policy
from rdq_lab.agent.replay import Batch
from rdq_lab.agent.state import TrainState
from rdq_lab.config.schema import AgentConfig
from rdq_lab.envs.types import Action
from rdq_lab.errors import TrainingError
from rdq_lab.neural.losses import Q_LOSSES, kl_from_logits, softmax
from rdq_lab.neural.mlp import MlpParams, backward, forward, forward_with_cache
from rdq_lab.neural.optim import adam_step
from rdq_lab.rules.models import RuleSet

logger = logging.getLogger(__name__)


class LossReport(NamedTuple):
    q_loss: float
    kl_loss: float
    total: float


def kl_enabled(kind: str, cfg: AgentConfig, rules: RuleSet) -> bool:
    """Whether the distillation term takes part in the loss for this agent kind."""
    if kind != "rdq" or cfg.kl_weight == 0.0:
        return False
    return not (cfg.kl_only_when_rules_nonempty and not len(rules))


def td_targets(target: MlpParams, batch: Batch, gamma: float) -> np.ndarray:
    q_next = forward(target, batch.next_states)
    return batch.rewards + gamma * np.max(q_next, axis=1) * (1.0 - batch.terminals)


def combined_loss_and_grad(
    online: MlpParams,
    target: MlpParams,
    batch: Batch,
    rules: RuleSet,
    actions: Sequence[Action],
    cfg: AgentConfig,
    *,
    use_kl: bool,
) -> Tuple[LossReport, MlpParams]:
    n = len(batch)
    q_all, cache = forward_with_cache(online, batch.states)
    y = td_targets(target, batch, cfg.gamma)
    rows = np.arange(n)
    pred = q_all[rows, batch.actions]

    loss_fn, grad_fn = Q_LOSSES[cfg.q_loss]
    q_loss = float(np.mean(loss_fn(pred, y)))
    dq = np.zeros_like(q_all)
    dq[rows, batch.actions] = grad_fn(pred, y) / n

    kl_loss = 0.0
    total = q_loss
    if use_kl:
        pi = softmax(forward(target, batch.states), cfg.temperature)
        teacher = teacher_from_policy(
            pi, safe_mask(batch.s_qsr, rules, actions), cfg.teacher_normalization
        )
        kl, kl_grad = kl_from_logits(q_all, teacher, cfg.temperature, cfg.kl_floor)
        kl_loss = float(np.mean(kl))
        total = q_loss + cfg.kl_weight * kl_loss
        dq = dq + cfg.kl_weight * kl_grad / n

    if not np.isfinite(total):
        raise TrainingError(f"non-finite loss (q={q_loss}, kl={kl_loss})")
    return LossReport(q_loss, kl_loss, total), backward(online, cache, dq)


def optimize_step(
    ts: TrainState,
    batch: Batch,
    actions: Sequence[Action],
    cfg: AgentConfig,
    *,
    use_kl: bool,
) -> LossReport:
    """One Adam step on the combined loss; updates ``ts.online`` and ``ts.opt``."""
    try:
        report, grads = combined_loss_and_grad(
            ts.online, ts.target, batch, ts.rules, actions, cfg, use_kl=use_kl
        )
        ts.online, ts.opt = adam_step(ts.online, grads, ts.opt)
    except TrainingError as exc:
        raise TrainingError(exc.detail, step=ts.step) from exc
    return report


def sync_target(ts: TrainState, period: int) -> bool:
    """Copy θ into θ⁻ when ``ts.step`` is a multiple of *period*."""
    if ts.step % period:
        return False
    ts.target = ts.online.copy()
    logger.debug("Target network synced at step %d", ts.step)
    return True
