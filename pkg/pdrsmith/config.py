"""
Environment configuration for pdrsmith

Values come from the process environment, optionally seeded from a .env file
in the working directory.
"""
import os
from dataclasses import dataclass

from dotenv import load_dotenv

from pdrsmith.errors import ConfigError

load_dotenv()


def _int(name, default):
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{raw}'") from None


def _float(name, default):
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{name} must be a number, got '{raw}'") from None


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    timeout: float = 60.0
    jobs: int = 1
    agent_endpoint: str = None
    agent_api_key: str = None
    agent_model: str = None
    log_level: str = 'WARNING'


def get_settings():
    """Settings from PDRSMITH_* environment variables"""
    return Settings(
        seed=_int('PDRSMITH_SEED', 0),
        timeout=_float('PDRSMITH_TIMEOUT', 60.0),
        jobs=_int('PDRSMITH_JOBS', 1),
        agent_endpoint=os.getenv('PDRSMITH_AGENT_ENDPOINT') or None,
        agent_api_key=os.getenv('PDRSMITH_AGENT_API_KEY') or None,
        agent_model=os.getenv('PDRSMITH_AGENT_MODEL') or None,
        log_level=(os.getenv('PDRSMITH_LOG_LEVEL') or 'WARNING').upper(),
    )
