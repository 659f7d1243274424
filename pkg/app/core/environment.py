from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict

class EnvironmentSettings(BaseSettings):
    """
    Toolkit configuration settings loaded from environment variables or defaults.

    Run defaults live here so that a `.env` file can move the whole toolkit to another
    configuration without touching the command line.

    Args:
        BaseSettings: Pydantic BaseSettings class that provides environment variable parsing and validation.
    """
    # --- General ---
    ENVIRONMENT: Literal['production', 'development', 'local'] = 'local'

    # --- Logging ---
    LOG_LEVEL: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'] = 'INFO'
    LOG_PATH: str = ''

    # --- Computational domain ---
    DEFAULT_L: float = 20.0
    DEFAULT_A: float = 4.0
    DEFAULT_N: int = 48
    RADIAL_NODES: int = 2000

    # --- Tolerances ---
    TOL_RADIAL: float = 1e-10
    TOL_EIG: float = 1e-8
    MAX_RADIAL_ITER: int = 500

    # --- Storage ---
    CACHE_DIR: str = '.cache/radial'
    OUTPUT_DIR: str = 'reports'

    model_config = SettingsConfigDict(env_file='.env', env_file_encoding='utf-8', extra='ignore')

# --- Singleton Instance ---
settings = EnvironmentSettings()
