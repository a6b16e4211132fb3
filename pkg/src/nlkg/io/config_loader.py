"""Load YAML run configurations.

Keys may be nested sections or flat dotted keys; both normalise to the
nested form RunConfig validates:

    grid:                     grid.R: 30
      R: 30          <=>      grid.n: 1024
      n: 1024
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Optional

import yaml

from src.nlkg.errors import ConfigError
from src.nlkg.schemas.contracts import RunConfig

logger = logging.getLogger(__name__)


def _insert(target: dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    node = target
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(dotted, f"'{part}' is a value, not a section")
        node = child
    leaf = parts[-1]
    if leaf in node and isinstance(node[leaf], dict) and isinstance(value, dict):
        for key, sub in value.items():
            _insert(node[leaf], key, sub)
        return
    if leaf in node:
        raise ConfigError(dotted, "given more than once")
    node[leaf] = value


def normalise_keys(raw: dict[str, Any]) -> dict[str, Any]:
    """Expand dotted keys into nested sections."""
    nested: dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, dict):
            value = normalise_keys(value)
        _insert(nested, str(key), value)
    return nested


def load_raw_config(config_path: Path) -> dict[str, Any]:
    with config_path.open("r", encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError("config", f"{config_path} is not valid YAML: {e}") from e
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("config", f"{config_path} must hold a mapping, got {type(raw).__name__}")
    return normalise_keys(raw)


def load_config(config_path: Optional[Path] = None, seed: Optional[int] = None) -> RunConfig:
    """Read, normalise and validate a run configuration.

    Without a path the defaults of RunConfig apply. seed overrides data.seed.
    Raises pydantic.ValidationError naming the offending field.
    """
    raw = load_raw_config(Path(config_path)) if config_path is not None else {}
    if seed is not None:
        raw.setdefault("data", {})["seed"] = seed
    cfg = RunConfig.model_validate(raw)
    logger.info(
        "Loaded config%s: p=%g s=%g N=%g grid=(R=%g, n=%d) T=%g dt=%g data=%s",
        f" {config_path}" if config_path else "", cfg.p, cfg.s, cfg.N,
        cfg.grid.R, cfg.grid.n, cfg.evolution.T, cfg.evolution.dt, cfg.data.kind,
    )
    return cfg
