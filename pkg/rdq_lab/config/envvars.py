"""``${VAR}`` expansion in configuration values.

Lets machine-specific paths live outside the file, e.g.
``output_dir: ${RDQ_OUT:-runs}/sweep``. A ``:-`` suffix gives the value
used when the variable is unset; without one the placeholder stays as
written and is reported once in the log.
"""

from __future__ import annotations

import logging
import os
import re
from typing import Any, Set

logger = logging.getLogger(__name__)

# ${NAME} or ${NAME:-fallback}
_ENV_VAR_RE = re.compile(r"\$\{(\w+)(?::-([^}]*))?\}")


def _expand(value: Any, unresolved: Set[str]) -> Any:
    if isinstance(value, str):

        def _sub(m: re.Match) -> str:
            name, fallback = m.group(1), m.group(2)
            if name in os.environ:
                return os.environ[name]
            if fallback is not None:
                return fallback
            unresolved.add(name)
            return m.group(0)

        return _ENV_VAR_RE.sub(_sub, value)
    if isinstance(value, dict):
        return {k: _expand(v, unresolved) for k, v in value.items()}
    if isinstance(value, list):
        return [_expand(item, unresolved) for item in value]
    return value


def expand_env_vars(value: Any) -> Any:
    """Expand placeholders in every string leaf of nested dicts and lists."""
    unresolved: Set[str] = set()
    expanded = _expand(value, unresolved)
    if unresolved:
        logger.warning(
            "Unset environment variable(s) left as written: %s", ", ".join(sorted(unresolved))
        )
    return expanded
