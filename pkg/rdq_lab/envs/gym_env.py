"""Gymnasium wrapper over the pure ``reset``/``step`` functions."""

from __future__ import annotations

import logging
from typing import Any, Dict, Optional, Tuple

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from rdq_lab.envs.core import enumerate_actions, reset, state_size, step, vectorize
from rdq_lab.envs.types import GridState, LevelConfig
from rdq_lab.errors import ConfigurationError

logger = logging.getLogger(__name__)


class LabEnv(gym.Env):
    """A gridworld level as a ``gymnasium.Env``.

    Parameters
    ----------
    level:
        The level to play until a new one is injected through
        ``reset(options={"level": ...})``.
    render_mode:
        ``"ansi"`` returns frames from :meth:`render`; ``"human"`` prints them.
    """

    metadata = {"render_modes": ["ansi", "human"], "render_fps": 4}

    def __init__(self, level: LevelConfig, render_mode: Optional[str] = None) -> None:
        super().__init__()
        if render_mode is not None and render_mode not in self.metadata["render_modes"]:
            raise ConfigurationError(f"Unsupported render_mode '{render_mode}'.")
        self.render_mode = render_mode
        self.level = level
        self.actions = enumerate_actions(level.domain)
        self.state: GridState = reset(level)
        self.action_space = spaces.Discrete(len(self.actions))
        self.observation_space = spaces.Box(
            low=-1.0,
            high=1.0,
            shape=(state_size(level.domain, self.state.grid_dims),),
            dtype=np.float64,
        )

    def reset(
        self,
        *,
        seed: Optional[int] = None,
        options: Optional[Dict[str, Any]] = None,
    ) -> Tuple[np.ndarray, Dict[str, Any]]:
        super().reset(seed=seed)
        new_level = (options or {}).get("level")
        if new_level is not None:
            if new_level.domain != self.level.domain:
                raise ConfigurationError(
                    f"Cannot switch a {self.level.domain} env to a {new_level.domain} level."
                )
            logger.debug(
                "Injecting level %s/%d", new_level.novelty_kind, new_level.level_index
            )
            self.level = new_level
        self.state = reset(self.level)
        if self.render_mode == "human":
            self.render()
        return vectorize(self.state), {"state": self.state}

    def step(self, action: Any) -> Tuple[np.ndarray, float, bool, bool, Dict[str, Any]]:
        outcome = step(self.state, self.actions[int(action)])
        self.state = outcome.next_state
        info = {"failure": outcome.failure, "state": self.state, **outcome.info}
        if self.render_mode == "human":
            self.render()
        terminated = outcome.terminal and not outcome.truncated
        return vectorize(self.state), outcome.reward, terminated, outcome.truncated, info

    def render(self) -> Optional[str]:
        from rdq_lab.display.render import render_state

        frame = render_state(self.state)
        if self.render_mode == "human":
            print(frame + "\n")
            return None
        return frame
