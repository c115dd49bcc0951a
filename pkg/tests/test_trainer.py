"""End-to-end training-loop tests on the baseline FrozenLake level."""

import json
import os

import numpy as np
import pandas as pd
import pytest

from rdq_lab.agent.runlog import RUN_LOG_COLUMNS, read_run_log
from rdq_lab.agent.state import AgentMode
from rdq_lab.agent.trainer import Agent, train, train_agent
from rdq_lab.config.schema import LabConfig
from rdq_lab.envs.core import baseline_level
from rdq_lab.errors import ConfigurationError
from rdq_lab.events.logger import EventLogger
from rdq_lab.rules.memory import ConsistencySample
from rdq_lab.rules.rulefile import parse_rules_file


@pytest.fixture
def level(tiny_config):
    return baseline_level("frozenlake", tiny_config.env.max_steps)


def _forbid(name):
    def _fail(*args, **kwargs):
        raise AssertionError(f"dqn run called {name}")

    return _fail


def test_dqn_never_touches_the_rule_engine(monkeypatch, level, tiny_config):
    for target in ("record_failure", "clear", "induce_from_memory"):
        monkeypatch.setattr(f"rdq_lab.agent.trainer.{target}", _forbid(target))
    for target in ("is_action_safe", "safe_actions", "select_random_safe_action"):
        monkeypatch.setattr(f"rdq_lab.agent.policy.{target}", _forbid(target))
    monkeypatch.setattr("rdq_lab.agent.learner.safe_mask", _forbid("safe_mask"))
    monkeypatch.setattr(ConsistencySample, "add", _forbid("ConsistencySample.add"))

    agent, log = train_agent(level, "dqn", tiny_config, seed=0, episodes=8)
    assert len(log) == 8
    assert all(r.rules_count == 0 and r.overridden_actions == 0 for r in log.records)
    assert agent.ts.memory.total == 0


def test_rdq_records_failures(level, tiny_config):
    agent, log = train_agent(level, "rdq", tiny_config, seed=1, episodes=10)
    assert sum(r.failures for r in log.records) > 0
    assert agent.ts.memory.total > 0
    assert len(agent.ts.consistency) > 0


def test_run_artifacts(tmp_path, level, tiny_config):
    out = str(tmp_path)
    log = train(level, "rdq", tiny_config, seed=2, out_dir=out)
    assert len(log) == tiny_config.train.episodes
    for suffix in (".csv", ".npz", ".rules", ".memory.json", ".events.jsonl"):
        assert os.path.exists(os.path.join(out, f"rdq_seed2{suffix}"))
    assert log.csv_path.endswith("rdq_seed2.csv")

    frame = read_run_log(log.csv_path)
    assert list(frame.columns) == RUN_LOG_COLUMNS
    assert frame["episode"].tolist() == list(range(tiny_config.train.episodes))
    assert (frame["steps"] <= tiny_config.env.max_steps).all()

    restored = Agent.from_checkpoint(log.checkpoint_path)
    rules = parse_rules_file(log.rules_path, restored.granularity, restored.actions)
    assert rules == restored.ts.rules
    with open(os.path.join(out, "rdq_seed2.events.jsonl"), encoding="utf-8") as f:
        events = [json.loads(line) for line in f]
    assert events[-1]["event_type"] == "RunFinished"
    assert any(e["event_type"] == "CheckpointSaved" for e in events)


def test_dqn_run_writes_no_rule_artifacts(tmp_path, level, tiny_config):
    log = train(level, "dqn", tiny_config, seed=2, out_dir=str(tmp_path), keep_checkpoint=False)
    assert log.rules_path == "" and log.memory_path == "" and log.checkpoint_path == ""
    assert sorted(os.listdir(tmp_path)) == ["dqn_seed2.csv", "dqn_seed2.events.jsonl"]


@pytest.mark.parametrize("kind", ["dqn", "rdq"])
def test_same_seed_same_run(tmp_path, level, tiny_config, kind):
    a = train(level, kind, tiny_config, seed=5, out_dir=str(tmp_path / "a"), episodes=8)
    b = train(level, kind, tiny_config, seed=5, out_dir=str(tmp_path / "b"), episodes=8)
    with open(a.csv_path, "rb") as fa, open(b.csv_path, "rb") as fb:
        assert fa.read() == fb.read()
    if kind == "rdq":
        with open(a.rules_path, "rb") as fa, open(b.rules_path, "rb") as fb:
            assert fa.read() == fb.read()


def test_unshielded_rdq_without_kl_matches_dqn(level, tiny_config):
    cfg = tiny_config.model_copy(
        update={
            "agent": tiny_config.agent.model_copy(
                update={"kl_weight": 0.0, "shield_enabled": False}
            )
        }
    )
    dqn_agent, dqn_log = train_agent(level, "dqn", cfg, seed=9, episodes=10)
    rdq_agent, rdq_log = train_agent(level, "rdq", cfg, seed=9, episodes=10)

    dqn_frame, rdq_frame = dqn_log.to_frame(), rdq_log.to_frame()
    for column in ("total_reward", "steps", "epsilon", "q_loss_mean"):
        pd.testing.assert_series_equal(dqn_frame[column], rdq_frame[column])
    np.testing.assert_array_equal(dqn_agent.ts.online.flatten(), rdq_agent.ts.online.flatten())
    assert rdq_agent.ts.memory.total > 0


def test_checkpoint_restores_agent(tmp_path, level, tiny_config):
    agent, log = train_agent(level, "rdq", tiny_config, seed=4, out_dir=str(tmp_path))
    restored = Agent.from_checkpoint(log.checkpoint_path)

    assert restored.kind == agent.kind and restored.domain == "frozenlake"
    assert restored.ts.step == agent.ts.step and restored.ts.episode == agent.ts.episode
    assert restored.ts.mode == agent.ts.mode
    assert restored.ts.rules == agent.ts.rules
    assert restored.ts.memory.total == agent.ts.memory.total
    assert restored.epsilon == agent.epsilon
    assert len(restored.replay) == 0

    obs = np.random.default_rng(0).random((5, agent.ts.online.input_size))
    np.testing.assert_array_equal(restored.q_values(obs), agent.q_values(obs))
    np.testing.assert_array_equal(restored.ts.target.flatten(), agent.ts.target.flatten())
    assert restored.rng.random() == agent.rng.random()


def test_training_continues_from_agent(level, tiny_config):
    agent, first = train_agent(level, "rdq", tiny_config, seed=6, episodes=3)
    steps_before = agent.ts.step
    second = train(level, "rdq", tiny_config, seed=6, agent=agent, episodes=2)
    assert [r.episode for r in second.records] == [0, 1]
    assert agent.ts.step == steps_before + sum(r.steps for r in second.records)
    assert agent.ts.episode == 5

    with pytest.raises(ConfigurationError):
        train(level, "dqn", tiny_config, seed=6, agent=agent, episodes=1)


def test_shield_holds_over_full_training(monkeypatch, level, tiny_config):
    from rdq_lab.agent import policy

    rule_counts = []

    def checked_act(online, s, s_qsr, epsilon, rules, actions, rng, *, shielded=True):
        decision = policy.act(online, s, s_qsr, epsilon, rules, actions, rng, shielded=shielded)
        allowed = [a for a in actions if not rules.violated_by(s_qsr, a)]
        if allowed:
            assert not rules.violated_by(s_qsr, decision.action), (str(s_qsr), decision)
        rule_counts.append(len(rules))
        return decision

    monkeypatch.setattr("rdq_lab.agent.trainer.act", checked_act)
    _, log = train_agent(level, "rdq", tiny_config, seed=3, episodes=50)
    assert len(rule_counts) == sum(r.steps for r in log.records)
    assert max(rule_counts) > 0


def test_stable_mode_entry_induces_once_more(monkeypatch, level, tiny_config):
    cfg = tiny_config.model_copy(
        update={"rules": tiny_config.rules.model_copy(update={"rule_update_interval": 10**6})}
    )
    agent = Agent.create("rdq", level, cfg, seed=0)
    calls = []
    monkeypatch.setattr(agent, "update_rules", lambda events: calls.append(agent.ts.mode))
    events = EventLogger("stable-entry")
    for _ in range(cfg.rules.stable_episodes):
        agent._end_of_episode(1.0, events)
    assert calls == [AgentMode.STABLE]


HOLE_RULES = {
    "unsafe(up) :- n_close(p, h).",
    "unsafe(down) :- s_close(p, h).",
    "unsafe(left) :- w_close(p, h).",
    "unsafe(right) :- e_close(p, h).",
}


@pytest.mark.slow
def test_rdq_discovers_hole_rules(tmp_path):
    cfg = LabConfig()
    level = baseline_level("frozenlake", cfg.env.max_steps)
    complete = 0
    for seed in range(5):
        out = str(tmp_path / f"seed{seed}")
        log = train(level, "rdq", cfg, seed=seed, out_dir=out, episodes=500, keep_checkpoint=False)
        agent = Agent.create("rdq", level, cfg, seed=seed)
        rules = parse_rules_file(log.rules_path, agent.granularity, agent.actions)
        complete += HOLE_RULES <= {str(rule) for rule in rules}
    assert complete >= 4


@pytest.mark.slow
def test_dqn_solves_the_baseline_map():
    cfg = LabConfig()
    level = baseline_level("frozenlake", cfg.env.max_steps)
    solved = 0
    for seed in range(5):
        log = train(level, "dqn", cfg, seed=seed, episodes=2000)
        solved += log.to_frame()["total_reward"].tail(100).mean() >= 0.9
    assert solved >= 4
