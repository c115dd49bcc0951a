"""Greedy rollouts of a saved agent, without learning."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from rdq_lab.agent.policy import act
from rdq_lab.agent.trainer import Agent
from rdq_lab.envs.core import baseline_level
from rdq_lab.envs.gym_env import LabEnv
from rdq_lab.envs.types import Cell, LevelConfig
from rdq_lab.errors import ConfigurationError
from rdq_lab.qsr.encoder import encode

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    actions: List[str] = field(default_factory=list)
    positions: List[Cell] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    failure: bool = False
    overridden: int = 0

    @property
    def total_reward(self) -> float:
        return float(sum(self.rewards))


@dataclass
class EvalResult:
    trajectories: List[Trajectory] = field(default_factory=list)

    @property
    def rewards(self) -> List[float]:
        return [t.total_reward for t in self.trajectories]

    @property
    def mean_reward(self) -> float:
        return float(np.mean(self.rewards)) if self.trajectories else 0.0


def evaluate(
    checkpoint: str,
    level: Optional[LevelConfig] = None,
    episodes: int = 1,
    render: bool = False,
    seed: int = 0,
) -> EvalResult:
    """Play *episodes* with ε = 0; rdq checkpoints keep the shield active.

    *level* defaults to the domain baseline. *seed* only matters when the
    shield has to pick among several safe actions.
    """
    agent = Agent.from_checkpoint(checkpoint)
    level = level or baseline_level(agent.domain, agent.cfg.env.max_steps)
    if level.domain != agent.domain:
        raise ConfigurationError(f"Checkpoint is a {agent.domain} agent, level is {level.domain}.")
    agent.reseed(seed)
    env = LabEnv(level, render_mode="human" if render else None)
    result = EvalResult()
    for _ in range(episodes):
        obs, info = env.reset()
        state = info["state"]
        traj = Trajectory(positions=[state.agent_pos])
        while True:
            decision = act(
                agent.ts.online,
                obs,
                encode(state, agent.granularity),
                0.0,
                agent.ts.rules,
                agent.actions,
                agent.rng,
                shielded=agent.shielded,
            )
            obs, reward, terminated, truncated, info = env.step(decision.action.id)
            state = info["state"]
            traj.actions.append(decision.action.name)
            traj.positions.append(state.agent_pos)
            traj.rewards.append(float(reward))
            traj.overridden += int(decision.overridden)
            if terminated or truncated:
                traj.failure = bool(info["failure"])
                break
        result.trajectories.append(traj)
        logger.debug(
            "Eval episode: reward %.3f in %d step(s)", traj.total_reward, len(traj.rewards)
        )
    logger.info(
        "Evaluated %s on %s/%d: mean reward %.3f over %d episode(s)",
        checkpoint,
        level.novelty_kind,
        level.level_index,
        result.mean_reward,
        episodes,
    )
    return result
