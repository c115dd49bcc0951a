"""Logging configuration for CLI invocations and sweep worker processes.

Every invocation logs to its own timestamped file. numpy floating-point
warnings raised during training are routed into the same file through
``py.warnings``. Sweep workers started by a process pool call
:func:`init_worker_logging` so their records land in the parent's file.
"""

import copy
import logging
import logging.config
import os
import sys
from datetime import datetime
from typing import Optional, Tuple

from rdq_lab.constants import LOG_DIR

_VALID_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

BASE_LOG_CFG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "run_file": {
            "format": (
                "%(asctime)s - %(processName)-17s - %(name)24s:%(lineno)-4d - "
                "%(levelname)-7s - %(message)s"
            ),
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
    },
    "handlers": {
        "run_file": {
            "class": "logging.FileHandler",
            "level": "DEBUG",
            "formatter": "run_file",
            "filename": "unset.log",
            "encoding": "utf-8",
        },
    },
    "loggers": {
        "py.warnings": {"handlers": ["run_file"], "propagate": False, "level": "WARNING"},
    },
    "root": {"handlers": ["run_file"], "level": "WARNING"},
}

# Subpackages with their own logger entry so levels can be tuned separately.
APP_LOGGERS = (
    "rdq_lab",
    "rdq_lab.envs",
    "rdq_lab.qsr",
    "rdq_lab.rules",
    "rdq_lab.neural",
    "rdq_lab.agent",
    "rdq_lab.harness",
    "rdq_lab.config",
    "rdq_lab.display",
)


def _normalize_level(log_lvl_str: str, quiet: bool) -> str:
    level = log_lvl_str.upper()
    if level in _VALID_LEVELS:
        return level
    if not quiet:
        print(f"Warning: invalid log level '{log_lvl_str}'. Using 'INFO'.")
    return "INFO"


def _build_config(log_fpath: str, level: str) -> dict:
    cfg: dict = copy.deepcopy(BASE_LOG_CFG)
    cfg["handlers"]["run_file"]["filename"] = log_fpath
    for name in APP_LOGGERS:
        cfg["loggers"][name] = {"handlers": ["run_file"], "propagate": False, "level": level}
    cfg["root"]["level"] = "DEBUG" if level == "DEBUG" else "WARNING"
    return cfg


def setup_logging(
    log_lvl_str: str,
    log_dir: Optional[str] = None,
    *,
    quiet: bool = False,
) -> Tuple[str, str]:
    """Configure file logging for one CLI invocation.

    Args:
        log_lvl_str: Level name such as ``'debug'`` or ``'info'``.
        log_dir: Directory for the log file (defaults to ``LOG_DIR``).
        quiet: Suppress the confirmation ``print()``.

    Returns:
        ``(log_file_path, level_name)``.
    """
    level = _normalize_level(log_lvl_str, quiet)
    target_dir = log_dir or LOG_DIR
    os.makedirs(target_dir, exist_ok=True)
    ts = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_fpath = os.path.join(target_dir, f"rdq_{ts}_{os.getpid()}_{level}.log")

    try:
        logging.config.dictConfig(_build_config(log_fpath, level))
        logging.captureWarnings(True)
        if not quiet:
            print(f"Logging initialized. File log level: {level}, log file: {log_fpath}")
    except Exception as e_log_cfg:
        if not quiet:
            print(f"Error applying logging configuration: {e_log_cfg}", file=sys.stderr)

    return log_fpath, level


def current_log_file() -> Optional[Tuple[str, str]]:
    """``(path, level)`` of the active run file, or ``None`` when logging is not set up."""
    app_logger = logging.getLogger("rdq_lab")
    for handler in app_logger.handlers:
        if isinstance(handler, logging.FileHandler):
            return handler.baseFilename, logging.getLevelName(app_logger.level)
    return None


def init_worker_logging(log_fpath: str, level: str) -> None:
    """Process-pool initializer: append to the parent's log file."""
    cfg = _build_config(log_fpath, level)
    cfg["handlers"]["run_file"]["mode"] = "a"
    logging.config.dictConfig(cfg)
    logging.captureWarnings(True)
