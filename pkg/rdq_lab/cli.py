"""CLI argument parsing and main entry point.

Subcommands:

* ``rdq-lab train``         single training run
* ``rdq-lab sweep``         novelty sweep from an experiment config
* ``rdq-lab induce``        offline rule induction from a stored failure memory
* ``rdq-lab eval``          greedy rollout of a checkpoint, no learning
* ``rdq-lab rules export``  checkpoint → rule file
* ``rdq-lab rules import``  rule file → checkpoint
* ``rdq-lab report``        re-aggregate stored sweep CSVs
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

from rdq_lab.constants import APP_NAME, APP_VERSION, DEFAULT_OUT_DIR, DOMAINS
from rdq_lab.display.console import disp_console_status, log_run_summary
from rdq_lab.display.logging_config import setup_logging
from rdq_lab.errors import ConfigurationError, LabBaseError

if TYPE_CHECKING:
    from rdq_lab.config.schema import LabConfig
    from rdq_lab.envs.types import Action
    from rdq_lab.qsr.regions import QsrGranularity

module_logger = logging.getLogger(__name__)

# Config file search order (first match wins)
_CONFIG_SEARCH_ORDER = ("rdq.yaml", "rdq.yml")
_CONFIG_ENV_VAR = "RDQ_CONFIG"


def _find_config_file() -> Optional[str]:
    """Locate a config file in the working directory; ``None`` means built-in defaults."""
    for name in _CONFIG_SEARCH_ORDER:
        candidate = os.path.join(os.getcwd(), name)
        if os.path.isfile(candidate):
            return candidate
    return None


def _load_config(args: argparse.Namespace) -> LabConfig:
    """Resolve the config path (flag → env var → auto-detect) and load it."""
    from rdq_lab.config.loader import load_lab_config
    from rdq_lab.config.schema import LabConfig

    config_path = getattr(args, "config", None) or os.environ.get(_CONFIG_ENV_VAR)
    if config_path is None:
        config_path = _find_config_file()
    if config_path is None:
        module_logger.info("No config file given; using built-in defaults.")
        return LabConfig()
    module_logger.info("Configuration file path resolved to: %s", os.path.abspath(config_path))
    return load_lab_config(config_path)


def _domain_objects(domain: str, cfg: LabConfig) -> Tuple[QsrGranularity, List[Action]]:
    from rdq_lab.envs.core import enumerate_actions
    from rdq_lab.qsr.regions import QsrGranularity

    return QsrGranularity.from_config(cfg.qsr), enumerate_actions(domain)


# ── ``rdq-lab train`` ────────────────────────────────────────────────────


def _cmd_train(args: argparse.Namespace) -> None:
    from rdq_lab.agent.trainer import train
    from rdq_lab.config.loader import load_level_config
    from rdq_lab.envs.core import baseline_level

    cfg = _load_config(args)
    if args.episodes is not None:
        cfg = cfg.model_copy(
            update={"train": cfg.train.model_copy(update={"episodes": args.episodes})}
        )
    if args.render:
        cfg = cfg.model_copy(update={"env": cfg.env.model_copy(update={"render": True})})
    domain = args.domain or cfg.experiment.domain
    if args.level:
        level = load_level_config(args.level)
        if level.domain != domain:
            raise ConfigurationError(
                f"Level file '{args.level}' is a {level.domain} level, not {domain}."
            )
    else:
        level = baseline_level(domain, cfg.env.max_steps)

    out_dir = args.out or DEFAULT_OUT_DIR
    log = train(level, args.agent, cfg, args.seed, out_dir)
    rewards = log.rewards()
    tail = rewards[-100:]
    summary = {
        "status": "finished",
        "run": log.run_id,
        "episodes": len(log),
        "mean reward (last 100)": f"{sum(tail) / len(tail):.3f}" if tail else "n/a",
        "run log": log.csv_path,
        "checkpoint": log.checkpoint_path,
    }
    if log.rules_path:
        summary["rules"] = log.rules_path
    log_run_summary(summary)
    disp_console_status("Train", "finished", {k: v for k, v in summary.items() if k != "status"})


# ── ``rdq-lab sweep`` ────────────────────────────────────────────────────


def _cmd_sweep(args: argparse.Namespace) -> None:
    from rdq_lab.harness.sweep import run_experiment

    cfg = _load_config(args)
    updates: Dict[str, Any] = {}
    if args.parallel is not None:
        updates["parallel"] = args.parallel
    if args.seed is not None:
        updates["root_seed"] = args.seed
    if args.out:
        updates["output_dir"] = args.out
    if updates:
        cfg = cfg.model_copy(update={"experiment": cfg.experiment.model_copy(update=updates)})

    result = run_experiment(cfg)
    details = {
        "output": result.output_dir,
        "cells": len(result.cells),
        "failed cells": len(result.failures),
    }
    log_run_summary({"status": "sweep finished", **details})
    disp_console_status(
        "Sweep",
        "finished" if not result.failures else "finished with failures",
        details,
        err_msg=result.failures[0].error if result.failures else None,
    )
    if result.failures:
        raise LabBaseError(f"{len(result.failures)} sweep cell(s) failed; see the log file.")


# ── ``rdq-lab induce`` ───────────────────────────────────────────────────


def _cmd_induce(args: argparse.Namespace) -> None:
    from rdq_lab.rules.induction import induce_from_memory
    from rdq_lab.rules.memory import load_memory
    from rdq_lab.rules.models import RuleSet
    from rdq_lab.rules.rulefile import write_rules_file

    cfg = _load_config(args)
    domain = args.domain or cfg.experiment.domain
    g, actions = _domain_objects(domain, cfg)
    memory, consistency = load_memory(args.memory, g, actions)
    min_support = args.min_support or cfg.rules.min_support
    positives, result = induce_from_memory(
        memory,
        consistency,
        min_support=min_support,
        support=args.support or cfg.rules.support,
        max_body_len=cfg.rules.max_body_len,
        fp_tolerance=cfg.rules.fp_tolerance,
    )
    rules = RuleSet.of(result.rules, version=1)
    out_path = args.out or os.path.splitext(args.memory)[0] + ".rules"
    write_rules_file(rules, out_path, g, annotate=True)
    for rule in rules:
        print(rule)
    disp_console_status(
        "Induce",
        f"{len(rules)} rule(s)",
        {
            "positives": len(positives),
            "unexplained": len(result.unexplained),
            "candidates tested": result.candidates_tested,
            "rule file": out_path,
        },
    )


# ── ``rdq-lab eval`` ─────────────────────────────────────────────────────


def _cmd_eval(args: argparse.Namespace) -> None:
    from rdq_lab.config.loader import load_level_config
    from rdq_lab.harness.evaluate import evaluate

    level = load_level_config(args.level) if args.level else None
    result = evaluate(
        args.checkpoint,
        level,
        episodes=args.episodes,
        render=args.render,
        seed=args.seed,
    )
    for i, traj in enumerate(result.trajectories):
        outcome = "failure" if traj.failure else "ok"
        print(f"episode {i}: reward {traj.total_reward:.3f} ({outcome}) {' '.join(traj.actions)}")
    print(f"mean reward: {result.mean_reward:.3f}")


# ── ``rdq-lab rules`` ────────────────────────────────────────────────────


def _cmd_rules(args: argparse.Namespace) -> None:
    from rdq_lab.agent.trainer import Agent
    from rdq_lab.rules.models import RuleSet
    from rdq_lab.rules.rulefile import parse_rules_file, write_rules_file

    agent = Agent.from_checkpoint(args.checkpoint)
    action = args.rules_action

    if action == "export":
        out_path = args.out or os.path.splitext(args.checkpoint)[0] + ".rules"
        write_rules_file(agent.ts.rules, out_path, agent.granularity, annotate=args.annotate)
        print(f"{len(agent.ts.rules)} rule(s) written to {out_path}")

    elif action == "import":
        parsed = parse_rules_file(args.rules_file, agent.granularity, agent.actions)
        version = max(parsed.version, agent.ts.rules.version + 1)
        agent.ts.rules = RuleSet(parsed.rules, version)
        out_path = agent.save(args.out or args.checkpoint)
        print(f"{len(parsed)} rule(s) (v{version}) stored in {out_path}")


# ── ``rdq-lab report`` ───────────────────────────────────────────────────


def _cmd_report(args: argparse.Namespace) -> None:
    from rdq_lab.config.schema import resolve_domain_default
    from rdq_lab.harness.aggregate import report

    cfg = _load_config(args)
    exp = cfg.experiment
    out_dir = args.out or exp.output_dir
    paths = report(
        out_dir,
        pre_window=exp.pre_window,
        post_window=exp.post_window,
        recovery_threshold=resolve_domain_default(
            exp.domain, "recovery_threshold", exp.recovery_threshold
        ),
        post_budget=exp.post_episodes,
    )
    disp_console_status("Report", "written", paths)


# ── CLI parser construction ──────────────────────────────────────────────


def _build_parser() -> argparse.ArgumentParser:
    """Build the argparse parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="rdq-lab",
        description=f"{APP_NAME} v{APP_VERSION}",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=str,
        default=None,
        metavar="PATH",
        help=f"Configuration file (YAML). Default: ${_CONFIG_ENV_VAR} or ./rdq.yaml if present",
    )
    common.add_argument(
        "--log-level",
        type=str,
        default="info",
        choices=["debug", "info", "warning", "error", "critical"],
        help="Set file logging level (default: info)",
    )

    subparsers = parser.add_subparsers(dest="command")

    # ── train ───────────────────────────────────────────────────
    sp_train = subparsers.add_parser("train", parents=[common], help="Run a single training run")
    sp_train.add_argument("--domain", choices=list(DOMAINS), default=None)
    sp_train.add_argument("--agent", choices=["dqn", "rdq"], default="rdq")
    sp_train.add_argument("--episodes", type=int, default=None, help="Override train.episodes")
    sp_train.add_argument("--seed", type=int, default=0)
    sp_train.add_argument(
        "--level", type=str, default=None, metavar="PATH", help="Level file (default: baseline)"
    )
    sp_train.add_argument(
        "--out", type=str, default=None, help=f"Output directory (default: {DEFAULT_OUT_DIR})"
    )
    sp_train.add_argument("--render", action="store_true", help="Print ASCII frames")
    sp_train.set_defaults(func=_cmd_train)

    # ── sweep ───────────────────────────────────────────────────
    sp_sweep = subparsers.add_parser(
        "sweep", parents=[common], help="Run a novelty sweep from an experiment config"
    )
    sp_sweep.add_argument(
        "experiment", nargs="?", default=None, metavar="EXPERIMENT", help="Experiment config (YAML)"
    )
    sp_sweep.add_argument("--parallel", type=int, default=None, metavar="N")
    sp_sweep.add_argument("--seed", type=int, default=None, help="Override experiment.root_seed")
    sp_sweep.add_argument("--out", type=str, default=None, help="Override experiment.output_dir")
    sp_sweep.set_defaults(func=_cmd_sweep)

    # ── induce ──────────────────────────────────────────────────
    sp_induce = subparsers.add_parser(
        "induce", parents=[common], help="Induce rules offline from a failure-memory file"
    )
    sp_induce.add_argument("memory", metavar="MEMORY", help="Failure memory JSON")
    sp_induce.add_argument("--domain", choices=list(DOMAINS), default=None)
    sp_induce.add_argument("--min-support", type=int, default=None)
    sp_induce.add_argument(
        "--support",
        choices=["body", "state"],
        default=None,
        help="Count min support per rule body or per exact failure",
    )
    sp_induce.add_argument("--out", type=str, default=None, help="Rule file to write")
    sp_induce.set_defaults(func=_cmd_induce)

    # ── eval ────────────────────────────────────────────────────
    sp_eval = subparsers.add_parser(
        "eval", parents=[common], help="Greedy rollout of a checkpoint (no learning)"
    )
    sp_eval.add_argument("--checkpoint", type=str, required=True, metavar="PATH")
    sp_eval.add_argument("--level", type=str, default=None, metavar="PATH")
    sp_eval.add_argument("--episodes", type=int, default=1)
    sp_eval.add_argument("--seed", type=int, default=0)
    sp_eval.add_argument("--render", action="store_true")
    sp_eval.set_defaults(func=_cmd_eval)

    # ── rules ───────────────────────────────────────────────────
    sp_rules = subparsers.add_parser(
        "rules", parents=[common], help="Move rule sets between checkpoints and rule files"
    )
    rules_sub = sp_rules.add_subparsers(dest="rules_action")

    sp_export = rules_sub.add_parser("export", help="Write a checkpoint's rules to a file")
    sp_export.add_argument("--checkpoint", type=str, required=True, metavar="PATH")
    sp_export.add_argument("--out", type=str, default=None)
    sp_export.add_argument("--annotate", action="store_true", help="Add readable comments")

    sp_import = rules_sub.add_parser("import", help="Validate a rule file into a checkpoint")
    sp_import.add_argument("rules_file", metavar="RULES")
    sp_import.add_argument("--checkpoint", type=str, required=True, metavar="PATH")
    sp_import.add_argument("--out", type=str, default=None, help="Checkpoint to write")

    sp_rules.set_defaults(func=_cmd_rules)

    # ── report ──────────────────────────────────────────────────
    sp_report = subparsers.add_parser(
        "report", parents=[common], help="Aggregate stored sweep CSVs"
    )
    sp_report.add_argument("--out", type=str, default=None, help="Sweep output directory")
    sp_report.set_defaults(func=_cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Program entry point: parse arguments and dispatch to subcommand."""
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return 2
    if args.command == "rules" and args.rules_action is None:
        parser.error("rules: choose 'export' or 'import'")
    if args.command == "sweep" and args.experiment:
        args.config = args.experiment

    setup_logging(args.log_level, quiet=True)
    module_logger.info("---- %s v%s: %s ----", APP_NAME, APP_VERSION, args.command)
    try:
        args.func(args)
    except LabBaseError as exc:
        module_logger.error("%s failed: %s", args.command, exc)
        print(f"Error: {exc}", file=sys.stderr)
        return 1
    return 0
