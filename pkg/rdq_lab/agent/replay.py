"""Experience replay: a fixed-capacity ring with uniform sampling.

Vectors are kept in preallocated numpy arrays sized on the first
``add``; the QSR state of each stored observation rides alongside so
the teacher policy can be rebuilt against the current rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from rdq_lab.envs.types import Action
from rdq_lab.errors import ConfigurationError, UsageError
from rdq_lab.qsr.encoder import QsrState


@dataclass(frozen=True)
class Experience:
    """One transition ``(s, a, r, s_next)`` plus the QSR encoding of ``s``.

    ``terminal`` is false for time-limit truncations so they still
    bootstrap from ``s_next``.
    """

    s: np.ndarray
    a: Action
    r: float
    s_next: np.ndarray
    terminal: bool
    s_qsr: QsrState


@dataclass
class Batch:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray
    s_qsr: List[QsrState]

    def __len__(self) -> int:
        return len(self.rewards)


class ReplayBuffer:
    """Ring buffer of :class:`Experience`; the oldest item is overwritten first."""

    def __init__(self, capacity: int = 50_000) -> None:
        if capacity < 1:
            raise ConfigurationError(f"replay capacity must be >= 1 (got {capacity})")
        self.capacity = capacity
        self._states: Optional[np.ndarray] = None
        self._next_states: Optional[np.ndarray] = None
        self._actions = np.zeros(capacity, dtype=np.int64)
        self._rewards = np.zeros(capacity, dtype=np.float64)
        self._terminals = np.zeros(capacity, dtype=np.float64)
        self._s_qsr: List[QsrState] = []
        self._next = 0
        self._size = 0

    def _allocate(self, width: int) -> None:
        self._states = np.zeros((self.capacity, width), dtype=np.float64)
        self._next_states = np.zeros((self.capacity, width), dtype=np.float64)

    def add(self, e: Experience) -> None:
        s = np.asarray(e.s, dtype=np.float64).ravel()
        if self._states is None:
            self._allocate(s.size)
        assert self._states is not None and self._next_states is not None
        if s.size != self._states.shape[1]:
            raise UsageError(
                f"Experience state of size {s.size} does not match buffer width "
                f"{self._states.shape[1]}."
            )
        i = self._next
        self._states[i] = s
        self._next_states[i] = np.asarray(e.s_next, dtype=np.float64).ravel()
        self._actions[i] = e.a.id
        self._rewards[i] = e.r
        self._terminals[i] = 1.0 if e.terminal else 0.0
        if i < len(self._s_qsr):
            self._s_qsr[i] = e.s_qsr
        else:
            self._s_qsr.append(e.s_qsr)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample_indices(self, batch_size: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw with replacement over the stored items."""
        if self._size == 0:
            raise UsageError("Cannot sample from an empty replay buffer.")
        return rng.integers(0, self._size, size=batch_size)

    def batch_at(self, idx: np.ndarray) -> Batch:
        assert self._states is not None and self._next_states is not None
        return Batch(
            states=self._states[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_states=self._next_states[idx],
            terminals=self._terminals[idx],
            s_qsr=[self._s_qsr[i] for i in idx],
        )

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        return self.batch_at(self.sample_indices(batch_size, rng))

    def __len__(self) -> int:
        return self._size
