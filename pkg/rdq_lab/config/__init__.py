"""Configuration loading and validation for RDQ Lab."""

from rdq_lab.config.envvars import expand_env_vars
from rdq_lab.config.loader import (
    dump_level_config,
    load_lab_config,
    load_level_config,
)
from rdq_lab.config.schema import (
    AgentConfig,
    EnvSettings,
    ExperimentSpec,
    LabConfig,
    QsrConfig,
    RuleConfig,
    TrainConfig,
    resolve_domain_default,
)

__all__ = [
    "AgentConfig",
    "EnvSettings",
    "ExperimentSpec",
    "LabConfig",
    "QsrConfig",
    "RuleConfig",
    "TrainConfig",
    "dump_level_config",
    "expand_env_vars",
    "load_lab_config",
    "load_level_config",
    "resolve_domain_default",
]
