"""Display subpackage - console output, ASCII rendering and logging configuration."""

from rdq_lab.display.console import disp_console_status, log_run_summary
from rdq_lab.display.logging_config import setup_logging
from rdq_lab.display.render import render_state

__all__ = [
    "disp_console_status",
    "log_run_summary",
    "render_state",
    "setup_logging",
]
