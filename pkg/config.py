"""
System Configuration
Field defaults, config-file loading and server settings
"""

import logging
import os
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv

from core.errors import ConfigError
from core.numeric import DEFAULT_CONFIG, FieldConfig

# Load environment variables FIRST
load_dotenv()

logger = logging.getLogger(__name__)

# ============================================================================
# SERVER
# ============================================================================

HOST = os.getenv("HOST", "0.0.0.0")
PORT = int(os.getenv("PORT", "8000"))
DEBUG = os.getenv("DEBUG", "False").lower() == "true"
LOG_LEVEL = os.getenv("LOG_LEVEL", "info")

API_VERSION = "1.0.0"

# ============================================================================
# FIELD CONFIGURATION
# ============================================================================

# Environment variable naming a key=value file of field settings
CONFIG_ENV_VAR = "BTRACK_CONFIG"

FIELD_KEYS = {
    "truncation_order": int,
    "working_precision": int,
    "sequence_cutoff": int,
    "st_tolerance": str,
    "guard_digits": int,
    "hyperfinite_horizon": int,
}

# CLI flag -> FieldConfig field
FLAG_FIELDS = {
    "truncation": "truncation_order",
    "precision": "working_precision",
    "cutoff": "sequence_cutoff",
    "tol": "st_tolerance",
}


def _coerce(key: str, raw: Any) -> Any:
    try:
        return FIELD_KEYS[key](raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} = {raw!r} is not a valid {FIELD_KEYS[key].__name__}") from exc


def read_config_file(path: Optional[str] = None) -> Dict[str, Any]:
    """
    Field settings from the file named by BTRACK_CONFIG

    Keys are case-insensitive (TRUNCATION_ORDER=16); unknown keys are errors.
    """
    path = path if path is not None else os.getenv(CONFIG_ENV_VAR)
    if not path:
        return {}
    if not os.path.isfile(path):
        raise ConfigError(f"{CONFIG_ENV_VAR} points to a missing file: {path}")

    settings: Dict[str, Any] = {}
    for key, raw in dotenv_values(path).items():
        name = key.strip().lower()
        if name not in FIELD_KEYS:
            raise ConfigError(f"unknown setting '{key}' in {path}", f"known settings: {', '.join(FIELD_KEYS)}")
        if raw is None or raw.strip() == "":
            continue
        settings[name] = _coerce(name, raw.strip())
    logger.debug(f"⚙️ loaded {len(settings)} field setting(s) from {path}")
    return settings


def load_field_config(overrides: Optional[Dict[str, Any]] = None, path: Optional[str] = None) -> FieldConfig:
    """
    Build the FieldConfig: defaults < config file < explicit overrides

    Args:
        overrides: FieldConfig field names to values; None entries are ignored
        path: config file, defaulting to $BTRACK_CONFIG

    Returns:
        A validated, frozen FieldConfig
    """
    settings = read_config_file(path)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in FIELD_KEYS:
            raise ConfigError(f"unknown setting '{key}'")
        settings[key] = value
    if not settings:
        return DEFAULT_CONFIG
    return DEFAULT_CONFIG.with_overrides(**settings)
