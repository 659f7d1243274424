import sys
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from app.core.environment import settings

LOGGER_NAME = 'virial_spectrum'
LOG_FORMAT = '%(asctime)s | %(levelname)-7s | %(name)s | %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def _daily_log_file(log_path: str) -> Path:
    """Resolve LOG_PATH (a directory or a *.log file) to today's UTC log file."""
    directory = Path(log_path)
    if directory.suffix == '.log':
        directory = directory.parent
    directory.mkdir(parents=True, exist_ok=True)
    return directory / (datetime.now(timezone.utc).strftime('%Y%m%d') + '.log')


class LoggerSettings:
    """
    Singleton owner of the toolkit logger.

    Diagnostics go to stderr, so stdout carries only tables and `--json` documents.
    A daily file handler is added when LOG_PATH is set.
    """
    _instance: Optional['LoggerSettings'] = None
    logger: logging.Logger

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._configure()
        return cls._instance

    def _configure(self) -> None:
        self.logger = logging.getLogger(LOGGER_NAME)
        if self.logger.handlers:
            return

        self.logger.setLevel(settings.LOG_LEVEL)
        self.logger.propagate = False
        formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT)

        # --- stderr ---
        stream = logging.StreamHandler(sys.stderr)
        stream.setFormatter(formatter)
        self.logger.addHandler(stream)

        # --- Daily file ---
        if settings.LOG_PATH:
            file_handler = logging.FileHandler(_daily_log_file(settings.LOG_PATH), encoding='utf-8')
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

    def set_level(self, level: str) -> None:
        """
        Change the level at runtime (the CLI's --verbose / --quiet switches).

        Args:
            level (str): A logging level name such as 'DEBUG' or 'WARNING'.
        """
        self.logger.setLevel(level.upper())
        self.logger.debug('Log level set to %s', level.upper())

    def get_logger(self) -> logging.Logger:
        return self.logger


# --- Singleton Instance ---
logger_settings = LoggerSettings()
logger: logging.Logger = logger_settings.get_logger()
