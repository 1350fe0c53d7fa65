"""
Configuration Loader for the superkmer counter.

Settings resolve in this order:
1. Environment variables (a ``.env`` file is loaded first)
2. Default values
"""

import os
from typing import Any, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def str_to_bool(value: str) -> bool:
    """Convert string to boolean."""
    return value.lower() in ("true", "1", "yes", "on")


class Config:
    """Environment-backed settings for the application."""

    def get(self, key: str, default: Any = None, env_var: Optional[str] = None) -> Any:
        """
        Get configuration value with fallback chain: ENV -> default.

        Args:
            key: Configuration key
            default: Default value if not found
            env_var: Environment variable name (if different from key)

        Returns:
            Configuration value, coerced to the default's type
        """
        env_key = env_var or key.upper()
        env_value = os.getenv(env_key)
        if env_value is None or env_value == "":
            return default

        # bool before int: bool is an int subclass
        if isinstance(default, bool):
            return str_to_bool(env_value)
        elif isinstance(default, int):
            return int(env_value)
        elif isinstance(default, float):
            return float(env_value)
        return env_value


_config = Config()


# =============================================================================
# APPLICATION SETTINGS
# =============================================================================


def spill_dir() -> Optional[str]:
    """Shuffle spill directory, or None for in-memory spools."""
    return _config.get("spill_dir", None, "SKC_SPILL_DIR")


def log_level() -> str:
    return _config.get("log_level", "INFO", "SKC_LOG_LEVEL")


def log_file() -> Optional[str]:
    return _config.get("log_file", None, "SKC_LOG_FILE")


def default_workers() -> int:
    """Worker pool width: SKC_WORKERS, else the machine's core count."""
    return _config.get("workers", os.cpu_count() or 1, "SKC_WORKERS")
