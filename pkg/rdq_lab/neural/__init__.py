"""Minimal dense network, losses and optimizer on numpy."""

from rdq_lab.neural.checkpoint import load_checkpoint, save_checkpoint
from rdq_lab.neural.losses import (
    Q_LOSSES,
    floor_teacher,
    kl_divergence,
    kl_from_logits,
    log_softmax,
    smooth_l1,
    smooth_l1_grad,
    softmax,
)
from rdq_lab.neural.mlp import (
    ForwardCache,
    MlpParams,
    backward,
    finite_difference_grad,
    forward,
    forward_with_cache,
    init_params,
)
from rdq_lab.neural.optim import AdamState, adam_init, adam_step

__all__ = [
    "AdamState",
    "ForwardCache",
    "MlpParams",
    "Q_LOSSES",
    "adam_init",
    "adam_step",
    "backward",
    "finite_difference_grad",
    "floor_teacher",
    "forward",
    "forward_with_cache",
    "init_params",
    "kl_divergence",
    "kl_from_logits",
    "load_checkpoint",
    "log_softmax",
    "save_checkpoint",
    "smooth_l1",
    "smooth_l1_grad",
    "softmax",
]
