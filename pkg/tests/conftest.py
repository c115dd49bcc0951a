"""Shared fixtures for the RDQ Lab test suite."""

from __future__ import annotations

from typing import Dict, List

import pytest

from rdq_lab.config.schema import (
    AgentConfig,
    EnvSettings,
    ExperimentSpec,
    LabConfig,
    RuleConfig,
    TrainConfig,
)
from rdq_lab.envs.core import enumerate_actions
from rdq_lab.envs.types import Action
from rdq_lab.qsr.encoder import QsrState, Relation, parse_atom
from rdq_lab.qsr.regions import QsrGranularity


@pytest.fixture
def granularity() -> QsrGranularity:
    return QsrGranularity(directions=8, distance_bands=2, field_radius=2)


@pytest.fixture
def fl_actions() -> List[Action]:
    return enumerate_actions("frozenlake")


@pytest.fixture
def cr_actions() -> List[Action]:
    return enumerate_actions("crossroad")


@pytest.fixture
def by_name(fl_actions: List[Action]) -> Dict[str, Action]:
    return {a.name: a for a in fl_actions}


@pytest.fixture
def qsr(granularity: QsrGranularity):
    """Build a QsrState from atom texts: ``qsr("n_close(p, h)", ...)``."""

    def _make(*atoms: str) -> QsrState:
        relations: List[Relation] = [parse_atom(a, granularity) for a in atoms]
        return QsrState.of(relations)

    return _make


@pytest.fixture
def tiny_config() -> LabConfig:
    """Small network and short episodes so full training runs take well under a second."""
    return LabConfig(
        env=EnvSettings(max_steps=30),
        rules=RuleConfig(min_support=2, rule_update_interval=20, consistency_capacity=500),
        agent=AgentConfig(
            hidden_sizes=[16],
            batch_size=8,
            buffer_capacity=500,
            learning_starts=16,
            epsilon_decay_steps=200,
            target_sync_period=50,
        ),
        train=TrainConfig(episodes=5),
    )


@pytest.fixture
def tiny_sweep_config(tiny_config: LabConfig) -> LabConfig:
    return tiny_config.model_copy(
        update={
            "experiment": ExperimentSpec(
                domain="frozenlake",
                agents=["dqn", "rdq"],
                novelties=["shuffled_holes", "flipped_start_goal"],
                levels_per_novelty=3,
                seeds=2,
                pre_episodes=3,
                post_episodes=2,
                pre_window=2,
                post_window=2,
                root_seed=7,
            )
        }
    )
