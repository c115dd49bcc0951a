"""Human-editable rule files.

Format (UTF-8, ``#`` starts a comment, one rule per line)::

    # RDQ Lab rule file
    # version: 4
    # granularity: D=8 K=2 R=2
    unsafe(up) :- n_close(p, h).
    unsafe(right) :- e_close(p, c), ne_far(p, c).

The writer sorts rules by (action name, body text). The parser reports
every bad line with its number; in non-strict mode bad lines are
skipped with a warning instead.
"""

from __future__ import annotations

import logging
import os
import re
from typing import List, Optional, Sequence, Tuple

from rdq_lab.constants import RULE_FILE_HEADER
from rdq_lab.envs.types import Action
from rdq_lab.errors import LabBaseError, RuleFileError
from rdq_lab.qsr.encoder import parse_atom
from rdq_lab.qsr.regions import QsrGranularity
from rdq_lab.rules.models import Rule, RuleSet, describe_rule

logger = logging.getLogger(__name__)

_RULE_RE = re.compile(r"^unsafe\(\s*([A-Za-z0-9_]+)\s*\)\s*:-\s*(.*?)\s*\.$")
_ATOM_RE = re.compile(r"[a-z0-9_]+\s*\([^()]*\)")
# Commas outside parentheses
_LITERAL_SEP_RE = re.compile(r",(?![^()]*\))")
_VERSION_RE = re.compile(r"^#\s*version:\s*(\d+)\s*$")


def rules_to_text(rs: RuleSet, g: QsrGranularity, annotate: bool = False) -> str:
    lines = [
        RULE_FILE_HEADER,
        f"# version: {rs.version}",
        f"# granularity: {g.describe()}",
    ]
    for rule in sorted(rs.rules, key=Rule.sort_key):
        if annotate:
            lines.append(f"# {describe_rule(rule)}")
        lines.append(str(rule))
    return "\n".join(lines) + "\n"


def _parse_rule_line(
    text: str,
    g: QsrGranularity,
    actions_by_name: dict,
) -> Rule:
    match = _RULE_RE.match(text)
    if match is None:
        raise ValueError("expected 'unsafe(<action>) :- <atom>{, <atom>}.'")
    action_name, body_txt = match.groups()
    if action_name not in actions_by_name:
        raise ValueError(f"unknown action '{action_name}'")
    atoms = [part.strip() for part in _LITERAL_SEP_RE.split(body_txt)]
    if not all(atoms):
        raise ValueError(f"empty literal in rule body '{body_txt}'")
    if not all(_ATOM_RE.fullmatch(atom) for atom in atoms):
        raise ValueError(f"malformed rule body '{body_txt}'")
    relations = []
    for atom in atoms:
        try:
            relations.append(parse_atom(atom, g))
        except LabBaseError as exc:
            raise ValueError(str(exc)) from None
    if len(set(relations)) != len(relations):
        raise ValueError("duplicate literal in rule body")
    return Rule(body=frozenset(relations), forbidden_action=actions_by_name[action_name])


def rules_from_text(
    text: str,
    g: QsrGranularity,
    actions: Sequence[Action],
    *,
    strict: bool = True,
    source: str = "<text>",
) -> RuleSet:
    actions_by_name = {a.name: a for a in actions}
    rules: List[Rule] = []
    version = 0
    diagnostics: List[Tuple[int, str]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        version_match = _VERSION_RE.match(stripped)
        if version_match:
            version = int(version_match.group(1))
            continue
        code = stripped.split("#", 1)[0].strip()
        if not code:
            continue
        try:
            rules.append(_parse_rule_line(code, g, actions_by_name))
        except ValueError as exc:
            diagnostics.append((line_no, str(exc)))

    if diagnostics:
        if strict:
            raise RuleFileError(source, diagnostics)
        for line_no, reason in diagnostics:
            logger.warning("%s:%d skipped: %s", source, line_no, reason)

    rs = RuleSet(tuple(rules), version)
    if len(rs) != len(rules):
        logger.warning("%s: %d duplicate rule(s) ignored", source, len(rules) - len(rs))
    return rs


def write_rules_file(
    rs: RuleSet,
    path: str,
    g: QsrGranularity,
    annotate: bool = False,
) -> None:
    """Write *rs* in canonical order (optionally with ``# not up: ...`` comments)."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(rules_to_text(rs, g, annotate=annotate))
    logger.debug("Wrote %d rule(s) (v%d) to %s", len(rs), rs.version, path)


def parse_rules_file(
    path: str,
    g: QsrGranularity,
    actions: Sequence[Action],
    *,
    strict: bool = True,
    encoding: Optional[str] = "utf-8",
) -> RuleSet:
    """Read a rule file; raises :class:`RuleFileError` listing every bad line."""
    try:
        with open(path, "r", encoding=encoding) as f:
            text = f.read()
    except OSError as exc:
        raise RuleFileError(path, [(0, f"cannot read file: {exc}")]) from exc
    return rules_from_text(text, g, actions, strict=strict, source=path)
