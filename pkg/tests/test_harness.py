"""Sweep planning, execution, aggregation and evaluation tests."""

import os

import numpy as np
import pandas as pd
import pytest

from rdq_lab.agent.trainer import train
from rdq_lab.config.schema import ExperimentSpec, LabConfig, RuleConfig
from rdq_lab.envs.core import baseline_level
from rdq_lab.errors import ConfigurationError
from rdq_lab.harness.aggregate import (
    DROPS_COLUMNS,
    RECOVERY_COLUMNS,
    SUMMARY_COLUMNS,
    SweepTables,
    aggregate,
    episodes_to_recovery,
    load_results,
    report,
)
from rdq_lab.harness.evaluate import evaluate
from rdq_lab.harness.sweep import cell_file_name, derive_seed, plan_cells, run_cell, run_experiment

# ── Planning ─────────────────────────────────────────────────────────────


def test_derive_seed_is_stable():
    assert derive_seed(7, "shuffled_holes", 1, 0) == derive_seed(7, "shuffled_holes", 1, 0)
    assert derive_seed(7, "shuffled_holes", 1, 0) != derive_seed(7, "shuffled_holes", 1, 1)
    assert 0 <= derive_seed("x") < 2**63


def test_plan_cells(tmp_path, tiny_sweep_config):
    cells = plan_cells(tiny_sweep_config, str(tmp_path))
    assert len(cells) == 2 * 3 * 2 * 2
    assert len({c.label for c in cells}) == len(cells)

    by_slot = {}
    for cell in cells:
        by_slot.setdefault((cell.novelty, cell.level.level_index, cell.seed_index), set()).add(
            cell.seed
        )
    assert all(len(seeds) == 1 for seeds in by_slot.values())
    assert len({next(iter(s)) for s in by_slot.values()}) == len(by_slot)

    for novelty in ("shuffled_holes", "flipped_start_goal"):
        written = sorted(os.listdir(tmp_path / "levels" / novelty))
        assert written == ["level0.yaml", "level1.yaml", "level2.yaml"]


def test_plan_is_reproducible(tiny_sweep_config):
    first = plan_cells(tiny_sweep_config)
    second = plan_cells(tiny_sweep_config)
    assert [(c.label, c.seed, c.level) for c in first] == [
        (c.label, c.seed, c.level) for c in second
    ]


# ── Full sweep ───────────────────────────────────────────────────────────


@pytest.fixture
def sweep(tmp_path, tiny_sweep_config):
    return run_experiment(tiny_sweep_config, str(tmp_path / "sweep"))


def test_run_experiment_layout(sweep):
    out = sweep.output_dir
    assert sweep.failures == []
    assert len(sweep.cells) == 24 and all(c.ok for c in sweep.cells)
    assert set(sweep.baselines) == {"dqn", "rdq"}
    for agent in ("dqn", "rdq"):
        assert os.path.exists(os.path.join(out, "baseline", f"{agent}.csv"))
        assert os.path.exists(os.path.join(out, "baseline", f"{agent}.npz"))
    assert os.path.exists(
        os.path.join(out, "cells", "shuffled_holes", f"{cell_file_name('rdq', 2, 1)}.csv")
    )
    for name in ("summary.csv", "recovery.csv", "drops.csv"):
        assert os.path.exists(os.path.join(out, name))

    summary = pd.read_csv(os.path.join(out, "summary.csv"))
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert len(summary) == 2 * 2 * (2 + 2)
    pre = summary[summary["episode_index"] < 0]
    assert set(pre["episode_index"]) == {-2, -1} and (pre["n"] == 1).all()
    post = summary[summary["episode_index"] >= 0]
    assert set(post["episode_index"]) == {0, 1} and (post["n"] == 3 * 2).all()

    recovery = pd.read_csv(os.path.join(out, "recovery.csv"))
    assert list(recovery.columns) == RECOVERY_COLUMNS
    assert recovery["median_episodes_to_recovery"].between(0, 2).all()
    assert list(pd.read_csv(os.path.join(out, "drops.csv")).columns) == DROPS_COLUMNS


def test_cell_rerun_is_byte_identical(tmp_path, sweep):
    result = sweep.cells[5]
    checkpoint = os.path.join(sweep.output_dir, "baseline", f"{result.cell.agent}.npz")
    again = run_cell(result.cell, checkpoint, str(tmp_path / "again"), episodes=2)
    with open(result.csv_path, "rb") as a, open(again, "rb") as b:
        assert a.read() == b.read()


def test_report_reproduces_tables(sweep):
    out = sweep.output_dir
    before = {}
    for name in ("summary.csv", "recovery.csv", "drops.csv"):
        with open(os.path.join(out, name), "rb") as f:
            before[name] = f.read()
    report(out, pre_window=2, post_window=2, recovery_threshold=1.0, post_budget=2)
    for name, content in before.items():
        with open(os.path.join(out, name), "rb") as f:
            assert f.read() == content


def test_load_results_skips_stray_files(sweep):
    stray = os.path.join(sweep.output_dir, "cells", "shuffled_holes", "notes.csv")
    with open(stray, "w", encoding="utf-8") as f:
        f.write("a,b\n1,2\n")
    tables = load_results(sweep.output_dir)
    assert len(tables.cells.groupby(["novelty", "agent", "level", "seed_index"])) == 24


def test_load_results_needs_cells(tmp_path):
    with pytest.raises(ConfigurationError):
        load_results(str(tmp_path))


# ── Aggregation on hand-built series ─────────────────────────────────────


def _cells(runs):
    """``runs``: list of (novelty, agent, level, seed_index, rewards)."""
    rows = [
        {
            "novelty": novelty,
            "agent": agent,
            "level": level,
            "seed_index": seed,
            "episode": i,
            "total_reward": float(r),
        }
        for novelty, agent, level, seed, rewards in runs
        for i, r in enumerate(rewards)
    ]
    return pd.DataFrame(rows)


def _baseline(rewards):
    return pd.DataFrame({"total_reward": np.asarray(rewards, dtype=float)})


def test_symmetric_runs_average_to_zero():
    r = np.array([0.5, -1.0, 2.0])
    tables = SweepTables(
        baselines={"rdq": _baseline([1.0, 0.0, 1.0])},
        cells=_cells([("n", "rdq", 0, 0, r), ("n", "rdq", 0, 1, -r)]),
    )
    summary = aggregate(tables, pre_window=2, post_window=2, recovery_threshold=1.0).summary
    post = summary[summary["episode_index"] >= 0]
    np.testing.assert_allclose(post["mean_reward"], 0.0)
    np.testing.assert_allclose(post["std_reward"], np.abs(r))
    assert (post["n"] == 2).all()

    pre = summary[summary["episode_index"] < 0]
    assert pre["episode_index"].tolist() == [-2, -1]
    assert pre["mean_reward"].tolist() == [0.0, 1.0]


def test_single_run_mean_is_the_run():
    r = [0.0, 1.0, 1.0, 0.0]
    tables = SweepTables(baselines={}, cells=_cells([("n", "dqn", 3, 0, r)]))
    summary = aggregate(tables, pre_window=5, post_window=2, recovery_threshold=1.0).summary
    assert summary["episode_index"].tolist() == [0, 1, 2, 3]
    assert summary["mean_reward"].tolist() == r
    assert (summary["std_reward"] == 0.0).all()


def test_recovery_matches_scan():
    runs = [
        ("n", "rdq", 0, 0, [0.0, 0.0, 1.0, 1.0]),
        ("n", "rdq", 1, 0, [0.0, 0.0, 0.0, 0.0]),
        ("n", "rdq", 2, 0, [1.0, 0.0, 0.0, 0.0]),
        ("n", "dqn", 0, 0, [0.0, 0.0, 0.0, 1.0]),
    ]
    tables = SweepTables(baselines={}, cells=_cells(runs))
    recovery = aggregate(
        tables, pre_window=1, post_window=1, recovery_threshold=1.0, post_budget=4
    ).recovery.set_index("agent")["median_episodes_to_recovery"]

    def scan(rewards):
        for i, reward in enumerate(rewards):
            if reward >= 1.0:
                return i
        return 4

    assert recovery["rdq"] == np.median([scan(r) for *_, r in runs[:3]]) == 2.0
    assert recovery["dqn"] == 3.0


def test_episodes_to_recovery():
    assert episodes_to_recovery([0.0, 0.9, 1.0], 1.0) == 2
    assert episodes_to_recovery([0.0, 0.0], 1.0) == 2
    assert episodes_to_recovery([0.0, 0.0], 1.0, budget=300) == 300
    assert episodes_to_recovery([], 1.0) == 0


def test_drops():
    tables = SweepTables(
        baselines={"rdq": _baseline([0.0, 1.0, 1.0])},
        cells=_cells([("n", "rdq", 0, 0, [0.0, 0.5, 1.0]), ("n", "rdq", 1, 0, [0.5, 0.5, 1.0])]),
    )
    drops = aggregate(tables, pre_window=2, post_window=2, recovery_threshold=1.0).drops
    row = drops.iloc[0]
    assert row["pre_mean"] == 1.0
    assert row["post_mean"] == pytest.approx(0.375)
    assert row["drop"] == pytest.approx(0.625)


def test_aggregate_rejects_empty():
    empty = pd.DataFrame(columns=["novelty", "agent", "level", "seed_index", "episode"])
    with pytest.raises(ConfigurationError):
        aggregate(
            SweepTables(baselines={}, cells=empty),
            pre_window=1,
            post_window=1,
            recovery_threshold=1.0,
        )


# ── Evaluation ───────────────────────────────────────────────────────────


def test_evaluate_is_deterministic(tmp_path, tiny_config):
    level = baseline_level("frozenlake", tiny_config.env.max_steps)
    log = train(level, "rdq", tiny_config, seed=3, out_dir=str(tmp_path))
    first = evaluate(log.checkpoint_path, episodes=2, seed=1)
    second = evaluate(log.checkpoint_path, episodes=2, seed=1)
    assert len(first.trajectories) == 2
    assert [t.actions for t in first.trajectories] == [t.actions for t in second.trajectories]
    assert first.rewards == second.rewards
    traj = first.trajectories[0]
    assert len(traj.positions) == len(traj.actions) + 1
    assert traj.positions[0] == (0, 0)
    assert 1 <= len(traj.actions) <= tiny_config.env.max_steps

    with pytest.raises(ConfigurationError):
        evaluate(log.checkpoint_path, level=baseline_level("crossroad"))


# ── Comparative sweeps ───────────────────────────────────────────────────


def _full_sweep(tmp_path, cfg):
    result = run_experiment(cfg, str(tmp_path / cfg.experiment.domain))
    assert result.failures == []
    return result.tables


@pytest.mark.slow
def test_rdq_recovers_faster_from_shuffled_holes(tmp_path):
    exp = ExperimentSpec(
        domain="frozenlake",
        novelties=["shuffled_holes"],
        levels_per_novelty=20,
        seeds=5,
        parallel=os.cpu_count() or 1,
    )
    tables = _full_sweep(tmp_path, LabConfig(experiment=exp))
    recovery = tables.recovery.set_index("agent")["median_episodes_to_recovery"]
    assert recovery["rdq"] <= 0.5 * recovery["dqn"]


@pytest.mark.slow
def test_rdq_drops_less_when_traffic_reverses(tmp_path):
    exp = ExperimentSpec(
        domain="crossroad",
        novelties=["opposite"],
        levels_per_novelty=20,
        seeds=5,
        post_window=50,
        parallel=os.cpu_count() or 1,
    )
    cfg = LabConfig(rules=RuleConfig(fp_tolerance=0.1), experiment=exp)
    drops = _full_sweep(tmp_path, cfg).drops.set_index("agent")
    assert drops.loc["rdq", "post_mean"] > drops.loc["dqn", "post_mean"]
    assert drops.loc["rdq", "drop"] < drops.loc["dqn", "drop"]
