"""Failure memory, rule induction, safety queries and rule files."""

from rdq_lab.rules.induction import InductionResult, induce_from_memory, induce_rules
from rdq_lab.rules.memory import (
    ConsistencySample,
    FailureMemory,
    clear,
    filter_outliers,
    load_memory,
    record_failure,
    save_memory,
)
from rdq_lab.rules.models import Rule, RuleSet, describe_rule
from rdq_lab.rules.rulefile import (
    parse_rules_file,
    rules_from_text,
    rules_to_text,
    write_rules_file,
)
from rdq_lab.rules.shield import is_action_safe, safe_actions, select_random_safe_action

__all__ = [
    "ConsistencySample",
    "FailureMemory",
    "InductionResult",
    "Rule",
    "RuleSet",
    "clear",
    "describe_rule",
    "filter_outliers",
    "induce_from_memory",
    "induce_rules",
    "is_action_safe",
    "load_memory",
    "parse_rules_file",
    "record_failure",
    "rules_from_text",
    "rules_to_text",
    "safe_actions",
    "save_memory",
    "select_random_safe_action",
    "write_rules_file",
]
