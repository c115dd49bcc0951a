"""Console summaries printed by the CLI commands."""

import logging
from datetime import datetime
from typing import Any, Dict, Optional

from rdq_lab.constants import APP_NAME, APP_VERSION

logger = logging.getLogger(__name__)

_LINE_LEN = 70


def disp_console_status(
    stage: str,
    status_msg: str,
    details: Optional[Dict[str, Any]] = None,
    err_msg: Optional[str] = None,
) -> None:
    """Print a framed status block for *stage* to standard output."""
    header = f" {APP_NAME} v{APP_VERSION} "
    ts = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    print(f"\n{'=' * _LINE_LEN}")
    print(f"{header:-^{_LINE_LEN}}")
    print(f"{'=' * _LINE_LEN}")
    print(f"[{ts}] {stage} Status: {status_msg}")
    for key, value in (details or {}).items():
        print(f"    {key}: {value}")
    if err_msg:
        print(f"    !! Error: {err_msg}")
    print("-" * _LINE_LEN)


def log_run_summary(summary: Dict[str, Any], log_lvl: int = logging.INFO) -> None:
    """Write the same details to the log file."""
    lines = [f"Run summary: {summary.get('status', 'done')}"]
    lines.extend(f"  {key}: {value}" for key, value in summary.items() if key != "status")
    logger.log(log_lvl, "\n".join(lines))
