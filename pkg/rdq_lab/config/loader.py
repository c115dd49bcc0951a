"""Reading and writing the lab's YAML files.

Two kinds of file go through here: lab configurations (:class:`LabConfig`,
one per CLI invocation or sweep) and level files (:class:`LevelConfig`,
written by the sweep planner under ``levels/<novelty>/`` and accepted by
``train --level``). Both are expanded for ``${VAR}`` placeholders and
validated in one pass, so a bad file reports every problem at once.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Type, TypeVar, Union

import yaml
from pydantic import BaseModel, ValidationError

from rdq_lab.config.envvars import expand_env_vars
from rdq_lab.config.schema import LabConfig
from rdq_lab.envs.types import LevelConfig
from rdq_lab.errors import ConfigurationError

logger = logging.getLogger(__name__)

_YAML_SUFFIXES = (".yaml", ".yml")

_ModelT = TypeVar("_ModelT", bound=BaseModel)

PathLike = Union[str, Path]


def _read_mapping(path: PathLike) -> Dict[str, Any]:
    fpath = Path(path)
    if fpath.suffix.lower() not in _YAML_SUFFIXES:
        raise ConfigurationError(
            f"Unsupported config file extension '{fpath.suffix}' for {fpath}; "
            f"expected one of {', '.join(_YAML_SUFFIXES)}."
        )
    if not fpath.is_file():
        raise ConfigurationError(f"Configuration file does not exist: {fpath}")
    try:
        data = yaml.safe_load(fpath.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"Cannot read {fpath}:\n  {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(
            f"{fpath}: top level must be a YAML mapping, got {type(data).__name__}."
        )
    return expand_env_vars(data)


def _describe(err: Dict[str, Any]) -> str:
    where = " → ".join(str(part) for part in err["loc"]) or "(file)"
    # Cross-field checks raise ValueError; pydantic prefixes their message.
    msg = str(err["msg"]).removeprefix("Value error, ")
    return f"  • {where}: {msg}"


def _parse(model: Type[_ModelT], data: Dict[str, Any], path: PathLike) -> _ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        problems = exc.errors()
        logger.debug("%s rejected with %d problem(s)", path, len(problems))
        raise ConfigurationError(
            f"Configuration validation failed ({len(problems)} error(s)):\n"
            + "\n".join(_describe(err) for err in problems)
        ) from exc


# ── Public API ───────────────────────────────────────────────────────────


def load_lab_config(cfg_fpath: PathLike) -> LabConfig:
    """Load a lab configuration; an empty file gives all defaults.

    Raises:
        ConfigurationError: unreadable file, wrong extension, or any
            validation failure.
    """
    config = _parse(LabConfig, _read_mapping(cfg_fpath), cfg_fpath)
    logger.info(
        "Configuration %s loaded: domain=%s, agents=%s, novelties=%s",
        cfg_fpath,
        config.experiment.domain,
        ",".join(config.experiment.agents),
        ",".join(config.experiment.novelties),
    )
    return config


def load_level_config(cfg_fpath: PathLike) -> LevelConfig:
    """Load a level file written by :func:`dump_level_config` or by hand."""
    level = _parse(LevelConfig, _read_mapping(cfg_fpath), cfg_fpath)
    logger.debug(
        "Level %s/%s #%d loaded from %s",
        level.domain,
        level.novelty_kind,
        level.level_index,
        cfg_fpath,
    )
    return level


def dump_level_config(level: LevelConfig, cfg_fpath: PathLike) -> None:
    """Write *level* so that :func:`load_level_config` returns an equal value."""
    fpath = Path(cfg_fpath)
    fpath.parent.mkdir(parents=True, exist_ok=True)
    text = yaml.safe_dump(level.model_dump(mode="json", exclude_none=True), sort_keys=False)
    fpath.write_text(text, encoding="utf-8")
    logger.debug("Level %s/%d written to %s", level.novelty_kind, level.level_index, fpath)
