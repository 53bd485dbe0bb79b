from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from loguru import logger
from ppm_shared.exceptions.ppm_error import PpmError, PpmErrorCode
from ppm_shared.schemas.protocol import ExperimentConfig
from pydantic import ValidationError

from ppm_engine.config import settings
from ppm_engine.harness.presets import get_preset

PARAMETER_SECTIONS = {"canonical", "macro"}


def deep_merge(base: Mapping[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; values of ``update`` win, nested mappings are merged key by key."""
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as error:
        raise PpmError(f"cannot read config {path}: {error}", error_code=PpmErrorCode.CONFIG_ERROR) from error
    if not isinstance(raw, dict):
        raise PpmError(f"config {path} must hold a mapping at top level", error_code=PpmErrorCode.CONFIG_ERROR)
    return raw


def validate_config(raw: Mapping[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as error:
        sections = {str(e["loc"][0]) for e in error.errors() if e["loc"]}
        code = PpmErrorCode.INVALID_PARAMETERS if sections & PARAMETER_SECTIONS else PpmErrorCode.CONFIG_ERROR
        raise PpmError(f"invalid experiment config: {error}", error_code=code) from error


def load_config(
    path: Optional[Path] = None,
    preset: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """Defaults (calendar from the environment settings) < preset < config file < overrides."""
    raw: Dict[str, Any] = {
        "calendar": {"day_length": settings.DAY_LENGTH_MIN, "days_per_year": settings.DAYS_PER_YEAR},
    }
    if preset:
        raw = deep_merge(raw, get_preset(preset))
    if path:
        file_raw = read_config_file(Path(path))
        # a file naming its own parameterisation replaces the preset's
        if PARAMETER_SECTIONS & file_raw.keys():
            for section in PARAMETER_SECTIONS:
                raw.pop(section, None)
        raw = deep_merge(raw, file_raw)
    if overrides:
        raw = deep_merge(raw, overrides)
    config = validate_config(raw)
    logger.debug(f"loaded config '{config.name}' (preset={preset}, file={path})")
    return config
