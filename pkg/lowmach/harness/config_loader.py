"""
Configuration file loading.

The primary format is plain text, one ``section.key = value`` per line::

    # 1D acceptance sweep
    grid.nx = 128
    sweep.epsilons = 0.4, 0.2, 0.1, 0.05

``#`` starts a comment, comma-separated values become lists. YAML files
(``.yaml``/``.yml``) with one mapping per section are accepted too.
Environment variables ``LOWMACH_<SECTION>__<KEY>`` override file values.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import yaml
from pydantic import ValidationError

from ..exceptions import ConfigError
from ..schemas.config import SimulationConfig

logger = logging.getLogger(__name__)

ENV_PREFIX = "LOWMACH_"
YAML_SUFFIXES = (".yaml", ".yml")


def parse_value(text: str) -> Any:
    """Parse one right-hand side: scalar, bool, or comma-separated list."""
    text = text.strip()
    if "," in text and not text.startswith("["):
        text = f"[{text}]"
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ValueError(f"cannot parse value {text!r}") from e


def parse_key_value(text: str, source: str = "<string>") -> Tuple[Dict[str, Dict[str, Any]], Dict[Tuple[str, str], int]]:
    """Parse the key = value format; returns the nested data and the line of each key."""
    data: Dict[str, Dict[str, Any]] = {}
    lines: Dict[Tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.count(".") != 1 or not all(key.split(".")):
            raise ConfigError(f"{source}:{lineno}: key {key!r} must look like 'section.key'")
        section, name = key.split(".")
        if name in data.get(section, {}):
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            data.setdefault(section, {})[name] = parse_value(value)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: {e}") from e
        lines[(section, name)] = lineno
    return data, lines


def _parse_yaml(text: str, source: str) -> Dict[str, Dict[str, Any]]:
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML format in {source}: {e}") from e
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ConfigError(f"{source}: expected one mapping per section")
    return data


def apply_env_overrides(data: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    """Apply ``LOWMACH_<SECTION>__<KEY>`` environment overrides for known sections."""
    for section in SimulationConfig.model_fields:
        prefix = f"{ENV_PREFIX}{section.upper()}__"
        for env_key, raw in os.environ.items():
            if env_key.upper().startswith(prefix):
                name = env_key[len(prefix):].lower()
                data.setdefault(section, {})[name] = parse_value(raw)
                logger.info(f"Config override from environment: {section}.{name}")
    return data


def _describe(error: Dict[str, Any], lines: Dict[Tuple[str, str], int], source: str) -> str:
    loc = tuple(str(p) for p in error.get("loc", ()))
    where = ".".join(loc) or "config"
    lineno = lines.get(loc[:2]) if len(loc) >= 2 else None
    prefix = f"{source}:{lineno}: " if lineno else f"{source}: "
    return f"{prefix}{where}: {error.get('msg', 'invalid value')}"


def build_config(
    data: Dict[str, Dict[str, Any]],
    lines: Dict[Tuple[str, str], int] = None,
    source: str = "<config>",
) -> SimulationConfig:
    """Validate nested data into a :class:`SimulationConfig`."""
    try:
        return SimulationConfig.model_validate(data)
    except ValidationError as e:
        details = "; ".join(_describe(err, lines or {}, source) for err in e.errors())
        raise ConfigError(f"Invalid configuration: {details}") from e


def load_config(path: Union[str, Path]) -> SimulationConfig:
    """Load, override from the environment, and validate a configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Failed to read config {path}: {e}") from e

    if path.suffix in YAML_SUFFIXES:
        data, lines = _parse_yaml(text, str(path)), {}
    else:
        data, lines = parse_key_value(text, str(path))

    config = build_config(apply_env_overrides(data), lines, str(path))
    logger.info(f"Loaded configuration from {path}")
    return config
