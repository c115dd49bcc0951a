"""The training loop wiring the simulator, the rule engine and the learner.

Each step: encode the QSR state, pick an action (shielded for rdq),
step the environment, store the experience, feed the failure memory
and, on the update cadence, optimize and re-induce rules. At the end of
every episode the mode machine decides whether a novelty occurred; rdq
induces once more when it settles into the stable mode.

Both agent kinds share this loop; the DQN baseline never touches the
rule engine and never adds the distillation term.
"""

from __future__ import annotations

import logging
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from rdq_lab.agent.learner import kl_enabled, optimize_step, sync_target
from rdq_lab.agent.policy import act
from rdq_lab.agent.replay import Experience, ReplayBuffer
from rdq_lab.agent.runlog import EpisodeRecord, RunLog
from rdq_lab.agent.state import AgentKind, AgentMode, EpsilonSchedule, TrainState, advance_mode
from rdq_lab.config.schema import LabConfig, resolve_domain_default
from rdq_lab.envs.core import enumerate_actions, reset, state_size
from rdq_lab.envs.gym_env import LabEnv
from rdq_lab.envs.types import Action, LevelConfig
from rdq_lab.errors import CheckpointError, ConfigurationError, TrainingError
from rdq_lab.events.logger import EventLogger
from rdq_lab.events.models import (
    CheckpointSaved,
    ModeChange,
    NoveltyDetected,
    RuleSetUpdate,
    RunFinished,
)
from rdq_lab.neural.checkpoint import load_checkpoint, save_checkpoint
from rdq_lab.neural.mlp import MlpParams, forward, init_params
from rdq_lab.neural.optim import AdamState, adam_init
from rdq_lab.qsr.encoder import encode
from rdq_lab.qsr.regions import QsrGranularity
from rdq_lab.rules.induction import induce_from_memory
from rdq_lab.rules.memory import (
    ConsistencySample,
    clear,
    memory_from_dict,
    memory_to_dict,
    record_failure,
    save_memory,
)
from rdq_lab.rules.rulefile import rules_from_text, rules_to_text, write_rules_file

logger = logging.getLogger(__name__)


# ── Agent ────────────────────────────────────────────────────────────────


class Agent:
    """A DQN or RDQ learner bound to one domain.

    Owns a single ``numpy`` generator; every random choice (initial
    weights, exploration, replay sampling) draws from it so a run is a
    pure function of (seed, config, level).
    """

    def __init__(
        self,
        kind: AgentKind,
        domain: str,
        cfg: LabConfig,
        ts: TrainState,
        rng: np.random.Generator,
    ) -> None:
        self.kind = kind
        self.domain = domain
        self.cfg = cfg
        self.ts = ts
        self.rng = rng
        self.actions: List[Action] = enumerate_actions(domain)
        self.granularity = QsrGranularity.from_config(cfg.qsr)
        self.replay = ReplayBuffer(cfg.agent.buffer_capacity)
        self.novelty_threshold = resolve_domain_default(
            domain, "novelty_threshold", cfg.agent.novelty_threshold
        )
        self.fp_tolerance = cfg.rules.fp_tolerance

    @classmethod
    def create(cls, kind: str, level: LevelConfig, cfg: LabConfig, seed: int) -> "Agent":
        """Fresh agent with randomly initialized online and target networks."""
        agent_kind = AgentKind(kind)
        rng = np.random.default_rng(seed)
        a = cfg.agent
        n_in = state_size(level.domain, reset(level).grid_dims)
        n_out = len(enumerate_actions(level.domain))
        online = init_params([n_in, *a.hidden_sizes, n_out], rng, a.activation)
        ts = TrainState(
            online=online,
            target=online.copy(),
            opt=adam_init(online, a.learning_rate, a.adam_beta1, a.adam_beta2, a.adam_eps),
            epsilon=EpsilonSchedule(a.epsilon_start, a.epsilon_end, a.epsilon_decay_steps),
            consistency=ConsistencySample(cfg.rules.consistency_capacity),
        )
        logger.info(
            "Created %s agent for %s: layers %s, seed %d",
            agent_kind.value,
            level.domain,
            online.layer_sizes,
            seed,
        )
        return cls(agent_kind, level.domain, cfg, ts, rng)

    def reseed(self, seed: int) -> None:
        self.rng = np.random.default_rng(seed)

    @property
    def is_rdq(self) -> bool:
        return self.kind == AgentKind.RDQ

    @property
    def shielded(self) -> bool:
        return self.is_rdq and self.cfg.agent.shield_enabled

    @property
    def epsilon(self) -> float:
        return self.ts.epsilon.value(self.ts.step)

    def q_values(self, s: np.ndarray) -> np.ndarray:
        return forward(self.ts.online, s)

    # ── Rule engine ──

    def update_rules(self, events: EventLogger) -> bool:
        """Re-induce rules from the failure memory; True if the RuleSet changed."""
        ts = self.ts
        if not len(ts.memory):
            return False
        positives, result = induce_from_memory(
            ts.memory,
            ts.consistency,
            min_support=self.cfg.rules.min_support,
            support=self.cfg.rules.support,
            max_body_len=self.cfg.rules.max_body_len,
            fp_tolerance=self.fp_tolerance,
        )
        if frozenset(result.rules) == frozenset(ts.rules.rules):
            return False
        ts.rules = ts.rules.evolve(result.rules)
        logger.info(
            "Rule set v%d: %d rule(s) from %d positive(s) at step %d",
            ts.rules.version,
            len(ts.rules),
            len(positives),
            ts.step,
        )
        events.record(
            RuleSetUpdate(
                version=ts.rules.version,
                rules=[str(r) for r in ts.rules],
                positives=len(positives),
                unexplained=len(result.unexplained),
                candidates_tested=result.candidates_tested,
            ),
            episode=ts.episode,
            step=ts.step,
        )
        return True

    def _end_of_episode(self, episode_reward: float, events: EventLogger) -> None:
        ts = self.ts
        change = advance_mode(
            ts, episode_reward, self.novelty_threshold, self.cfg.rules.stable_episodes
        )
        if change is None:
            return
        previous, current, reason = change
        if current == AgentMode.STABLE and self.is_rdq:
            # Last induction before the rules freeze.
            self.update_rules(events)
        if current == AgentMode.LEARNING_RULES:
            cleared_rules, cleared_failures = len(ts.rules), len(ts.memory)
            if self.is_rdq:
                ts.memory, ts.rules = clear(ts.memory, ts.rules)
            ts.epsilon.restart(ts.step, self.cfg.agent.epsilon_restart)
            logger.info(
                "Novelty detected at episode %d (reward %.3f < %.3f)",
                ts.episode,
                episode_reward,
                self.novelty_threshold,
            )
            events.record(
                NoveltyDetected(
                    episode_reward=episode_reward,
                    threshold=self.novelty_threshold,
                    cleared_rules=cleared_rules if self.is_rdq else 0,
                    cleared_failures=cleared_failures if self.is_rdq else 0,
                ),
                episode=ts.episode,
                step=ts.step,
            )
        events.record(
            ModeChange(previous=previous.value, current=current.value, reason=reason),
            episode=ts.episode,
            step=ts.step,
        )

    # ── Episodes ──

    def run_episode(self, env: LabEnv, events: EventLogger) -> EpisodeRecord:
        ts = self.ts
        a_cfg = self.cfg.agent
        use_shield = self.shielded
        obs, info = env.reset()
        state = info["state"]
        total_reward = 0.0
        steps = overridden = failures = 0
        q_losses: List[float] = []
        kl_losses: List[float] = []
        epsilon = self.epsilon

        while True:
            s_qsr = encode(state, self.granularity)
            epsilon = self.epsilon
            decision = act(
                ts.online,
                obs,
                s_qsr,
                epsilon,
                ts.rules,
                self.actions,
                self.rng,
                shielded=use_shield,
            )
            action = decision.action
            overridden += int(decision.overridden)
            next_obs, reward, terminated, truncated, info = env.step(action.id)
            self.replay.add(Experience(obs, action, reward, next_obs, terminated, s_qsr))
            if info["failure"]:
                failures += 1
            if self.is_rdq:
                if info["failure"]:
                    record_failure(ts.memory, s_qsr, action)
                else:
                    ts.consistency.add(s_qsr, action)

            ts.step += 1
            total_reward += reward
            steps += 1

            if len(self.replay) >= a_cfg.learning_starts and ts.step % a_cfg.train_frequency == 0:
                batch = self.replay.sample(a_cfg.batch_size, self.rng)
                report = optimize_step(
                    ts,
                    batch,
                    self.actions,
                    a_cfg,
                    use_kl=kl_enabled(self.kind.value, a_cfg, ts.rules),
                )
                q_losses.append(report.q_loss)
                kl_losses.append(report.kl_loss)
            sync_target(ts, a_cfg.target_sync_period)

            if (
                self.is_rdq
                and ts.mode == AgentMode.LEARNING_RULES
                and ts.step % self.cfg.rules.rule_update_interval == 0
            ):
                self.update_rules(events)

            obs, state = next_obs, info["state"]
            if terminated or truncated:
                break

        ts.episode += 1
        record = EpisodeRecord(
            episode=ts.episode - 1,
            total_reward=float(total_reward),
            steps=steps,
            epsilon=float(epsilon),
            q_loss_mean=float(np.mean(q_losses)) if q_losses else float("nan"),
            kl_loss_mean=float(np.mean(kl_losses)) if kl_losses else float("nan"),
            rules_count=len(ts.rules),
            overridden_actions=overridden,
            failures=failures,
            mode=ts.mode.value,
        )
        self._end_of_episode(total_reward, events)
        return record

    # ── Checkpoints ──

    def checkpoint_payload(self) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
        ts = self.ts
        arrays: Dict[str, np.ndarray] = {}
        for i, arr in enumerate(ts.online.arrays()):
            arrays[f"online_{i}"] = arr
        for i, arr in enumerate(ts.target.arrays()):
            arrays[f"target_{i}"] = arr
        for i, (m, v) in enumerate(zip(ts.opt.m, ts.opt.v)):
            arrays[f"adam_m_{i}"] = m
            arrays[f"adam_v_{i}"] = v
        metadata = {
            "kind": self.kind.value,
            "domain": self.domain,
            "config": self.cfg.model_dump(mode="json"),
            "granularity": self.granularity.describe(),
            "layer_sizes": ts.online.layer_sizes,
            "activation": ts.online.activation,
            "step": ts.step,
            "episode": ts.episode,
            "mode": ts.mode.value,
            "stable_streak": ts.stable_streak,
            "epsilon": {
                "anchor_step": ts.epsilon.anchor_step,
                "anchor_value": ts.epsilon.anchor_value,
            },
            "adam": {
                "step": ts.opt.step,
                "lr": ts.opt.lr,
                "beta1": ts.opt.beta1,
                "beta2": ts.opt.beta2,
                "eps": ts.opt.eps,
            },
            "rng_state": self.rng.bit_generator.state,
            "rules_text": rules_to_text(ts.rules, self.granularity),
            "memory": memory_to_dict(ts.memory, ts.consistency),
        }
        return arrays, metadata

    def save(self, path: str) -> str:
        arrays, metadata = self.checkpoint_payload()
        return save_checkpoint(path, arrays, metadata)

    @classmethod
    def from_checkpoint(cls, path: str) -> "Agent":
        """Restore an agent; the replay buffer starts empty."""
        arrays, meta = load_checkpoint(path)
        try:
            cfg = LabConfig.model_validate(meta["config"])
            kind = AgentKind(meta["kind"])
            domain = meta["domain"]
            n_arrays = 2 * (len(meta["layer_sizes"]) - 1)
            online = _params_from(arrays, "online", n_arrays, meta["activation"])
            target = _params_from(arrays, "target", n_arrays, meta["activation"])
            adam = meta["adam"]
            opt = AdamState(
                m=[arrays[f"adam_m_{i}"] for i in range(n_arrays)],
                v=[arrays[f"adam_v_{i}"] for i in range(n_arrays)],
                step=int(adam["step"]),
                lr=float(adam["lr"]),
                beta1=float(adam["beta1"]),
                beta2=float(adam["beta2"]),
                eps=float(adam["eps"]),
            )
        except (KeyError, ValueError) as exc:
            raise CheckpointError(f"Checkpoint '{path}' is incomplete: {exc}") from exc

        a = cfg.agent
        g = QsrGranularity.from_config(cfg.qsr)
        actions = enumerate_actions(domain)
        rules = rules_from_text(meta["rules_text"], g, actions, source=f"{path}:rules")
        memory, consistency = memory_from_dict(meta["memory"], g, actions)
        epsilon = EpsilonSchedule(
            a.epsilon_start,
            a.epsilon_end,
            a.epsilon_decay_steps,
            anchor_step=int(meta["epsilon"]["anchor_step"]),
            anchor_value=float(meta["epsilon"]["anchor_value"]),
        )
        ts = TrainState(
            online=online,
            target=target,
            opt=opt,
            epsilon=epsilon,
            rules=rules,
            memory=memory,
            consistency=consistency,
            step=int(meta["step"]),
            episode=int(meta["episode"]),
            mode=AgentMode(meta["mode"]),
            stable_streak=int(meta["stable_streak"]),
        )
        rng = np.random.default_rng()
        rng.bit_generator.state = meta["rng_state"]
        logger.info("Restored %s agent from %s (step %d)", kind.value, path, ts.step)
        return cls(kind, domain, cfg, ts, rng)


def _params_from(
    arrays: Dict[str, np.ndarray], prefix: str, count: int, activation: str
) -> MlpParams:
    found = [arrays[f"{prefix}_{i}"] for i in range(count)]
    return MlpParams(weights=found[0::2], biases=found[1::2], activation=activation)


# ── Training runs ────────────────────────────────────────────────────────


def _emit_checkpoint(events: EventLogger, agent: Agent, path: str, kind: str) -> None:
    events.record(
        CheckpointSaved(path=path, kind=kind), episode=agent.ts.episode, step=agent.ts.step
    )


def train(
    level: LevelConfig,
    agent_kind: str,
    cfg: LabConfig,
    seed: int,
    out_dir: Optional[str] = None,
    *,
    agent: Optional[Agent] = None,
    episodes: Optional[int] = None,
    run_id: Optional[str] = None,
    keep_checkpoint: bool = True,
) -> RunLog:
    """Train for ``episodes`` (default ``cfg.train.episodes``) on *level*.

    With *agent* given, training continues from that agent's state (its
    generator is left as is); otherwise a fresh agent is created from
    *seed*. The run log numbers episodes from 0 within this run.

    When *out_dir* is set the run writes ``<run_id>.csv``,
    ``<run_id>.events.jsonl``, a final ``<run_id>.npz`` checkpoint (unless
    *keep_checkpoint* is false) and, for rdq, ``<run_id>.rules`` and
    ``<run_id>.memory.json``.
    """
    if agent is None:
        agent = Agent.create(agent_kind, level, cfg, seed)
    elif agent.kind.value != agent_kind or agent.domain != level.domain:
        raise ConfigurationError(
            f"Agent is {agent.kind.value}/{agent.domain}, run asks for "
            f"{agent_kind}/{level.domain}."
        )
    budget = episodes if episodes is not None else cfg.train.episodes
    run_id = run_id or f"{agent_kind}_seed{seed}"
    log = RunLog(run_id=run_id)
    env = LabEnv(level, render_mode="human" if cfg.env.render else None)
    events = EventLogger(
        run_id, os.path.join(out_dir, f"{run_id}.events.jsonl") if out_dir else None
    )
    logger.info(
        "Training %s on %s/%s level %d for %d episode(s) (run %s)",
        agent_kind,
        level.domain,
        level.novelty_kind,
        level.level_index,
        budget,
        run_id,
    )

    def _path(suffix: str) -> str:
        assert out_dir is not None
        return os.path.join(out_dir, f"{run_id}{suffix}")

    try:
        for i in range(budget):
            try:
                record = agent.run_episode(env, events)
            except TrainingError as exc:
                diag = agent.save(_path(".diagnostic.npz")) if out_dir else None
                if diag:
                    _emit_checkpoint(events, agent, diag, "diagnostic")
                logger.error("Run %s aborted: %s", run_id, exc)
                raise TrainingError(exc.detail, step=exc.step, checkpoint_path=diag) from exc
            record.episode = i
            log.append(record)
            logger.debug(
                "Episode %d: reward %.3f, %d step(s), ε=%.3f, %d rule(s)",
                record.episode,
                record.total_reward,
                record.steps,
                record.epsilon,
                record.rules_count,
            )
            if out_dir is None:
                continue
            done = i + 1
            if cfg.train.checkpoint_every and done % cfg.train.checkpoint_every == 0:
                path = agent.save(_path(f".ep{done}.npz"))
                _emit_checkpoint(events, agent, path, "periodic")
            if agent.is_rdq and cfg.train.export_rules_every:
                if done % cfg.train.export_rules_every == 0:
                    write_rules_file(
                        agent.ts.rules, _path(f".ep{done}.rules"), agent.granularity
                    )

        if out_dir is not None:
            log.write_csv(_path(".csv"))
            if keep_checkpoint:
                log.checkpoint_path = agent.save(_path(".npz"))
                _emit_checkpoint(events, agent, log.checkpoint_path, "final")
            if agent.is_rdq:
                log.rules_path = _path(".rules")
                write_rules_file(agent.ts.rules, log.rules_path, agent.granularity, annotate=True)
                log.memory_path = _path(".memory.json")
                save_memory(agent.ts.memory, agent.ts.consistency, log.memory_path)
        events.record(
            RunFinished(episodes=len(log), rules=len(agent.ts.rules), counts=events.counts),
            episode=agent.ts.episode,
            step=agent.ts.step,
        )
    finally:
        events.close()

    logger.info(
        "Run %s finished: %d episode(s), mean reward %.3f, %d rule(s)",
        run_id,
        len(log),
        float(np.mean(log.rewards())) if len(log) else 0.0,
        len(agent.ts.rules),
    )
    return log


def train_agent(
    level: LevelConfig,
    agent_kind: str,
    cfg: LabConfig,
    seed: int,
    out_dir: Optional[str] = None,
    **kwargs: Any,
) -> Tuple[Agent, RunLog]:
    """Like :func:`train` but also returns the trained agent."""
    agent = kwargs.pop("agent", None) or Agent.create(agent_kind, level, cfg, seed)
    log = train(level, agent_kind, cfg, seed, out_dir, agent=agent, **kwargs)
    return agent, log
