"""Adam optimizer as a pure function over MlpParams."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from rdq_lab.errors import TrainingError, UsageError
from rdq_lab.neural.mlp import MlpParams


@dataclass
class AdamState:
    """First/second moments mirroring the parameter shapes plus the scalars."""

    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def copy(self) -> "AdamState":
        return AdamState(
            m=[a.copy() for a in self.m],
            v=[a.copy() for a in self.v],
            step=self.step,
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
        )


def adam_init(
    p: MlpParams,
    lr: float = 1e-3,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> AdamState:
    return AdamState(
        m=[np.zeros_like(a) for a in p.arrays()],
        v=[np.zeros_like(a) for a in p.arrays()],
        lr=lr,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(p: MlpParams, grads: MlpParams, state: AdamState) -> Tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update; inputs are left untouched."""
    params = p.arrays()
    g_arrays = grads.arrays()
    if len(g_arrays) != len(params) or any(
        g.shape != a.shape for g, a in zip(g_arrays, params)
    ):
        raise UsageError("Gradient shapes do not match the parameters.")
    if not grads.is_finite():
        raise TrainingError("non-finite gradient passed to the optimizer", step=state.step)

    step = state.step + 1
    correction1 = 1.0 - state.beta1**step
    correction2 = 1.0 - state.beta2**step
    new_params, new_m, new_v = [], [], []
    for a, g, m, v in zip(params, g_arrays, state.m, state.v):
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        new_params.append(a - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
        new_m.append(m)
        new_v.append(v)

    updated = MlpParams(
        weights=new_params[0::2], biases=new_params[1::2], activation=p.activation
    )
    new_state = AdamState(
        m=new_m,
        v=new_v,
        step=step,
        lr=state.lr,
        beta1=state.beta1,
        beta2=state.beta2,
        eps=state.eps,
    )
    return updated, new_state
