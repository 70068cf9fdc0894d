# wavetouch/config.py
"""
Environment configuration.

Values come from the process environment, optionally seeded from a ``.env``
file at the repository root.
"""

import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from wavetouch.errors import ConfigError

env_path = Path(__file__).resolve().parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

SEED_ENV = "WAVETOUCH_SEED"
LOG_LEVEL_ENV = "WAVETOUCH_LOG_LEVEL"
WORKERS_ENV = "WAVETOUCH_WORKERS"

DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_WORKERS = 8


def seed_override() -> Optional[int]:
    """Return the seed from ``WAVETOUCH_SEED`` or None when unset.

    Raises
    ------
    ConfigError
        If the variable is set but is not an unsigned integer.
    """
    raw = os.getenv(SEED_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        seed = int(raw.strip())
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an unsigned integer, got {raw!r}")
    if seed < 0:
        raise ConfigError(f"{SEED_ENV} must be an unsigned integer, got {raw!r}")
    return seed


def resolve_seed(flag_seed: int) -> int:
    """The environment wins over the ``--seed`` flag."""
    override = seed_override()
    return flag_seed if override is None else override


def max_workers() -> int:
    raw = os.getenv(WORKERS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_WORKERS
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return workers


def log_level() -> int:
    name = os.getenv(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL).strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"{LOG_LEVEL_ENV} is not a logging level: {name!r}")
    return level
