"""
Centralized Logging Configuration
=================================

This module initializes and manages the logging framework for the
`inflowlab` package. All modules record their activity to one timestamped
log file while also giving real-time console feedback.

Core Features:
--------------
* Timestamped Files: Generates a unique log filename
  (e.g., `inflowlab_20260217_1330.log`) upon initialization, saving all
  session output to the configured logs directory.
* Dual Output: Attaches both `FileHandler` and `StreamHandler` to capture
  persistent records alongside user-facing terminal output.
* Console Level Control: `set_console_level` lets the CLI honour
  `--quiet` and `--verbose` without touching the file record.
* Double-Logging Prevention: `get_logger` builds module-specific loggers
  that do not propagate to the root logger.
"""
from logging import Logger
from typing import Final
import logging
import os
import sys
import io
import glob
import atexit
from datetime import datetime

# Internal package imports
from inflowlab.paths import LOCAL_LOG_PATH


timestamp = datetime.now().strftime("%Y%m%d_%H%M")
LOG_FILENAME = f"inflowlab_{timestamp}.log"

LOG_PATH = os.path.join(LOCAL_LOG_PATH, LOG_FILENAME)
CLEAN_FORMAT: Final[str] = "%(asctime)s - %(levelname)s - %(message)s"

_PACKAGE_PREFIX: Final[str] = "inflowlab"


# pylint: disable=invalid-name
UTF8_CONSOLE = sys.stdout
if hasattr(sys.stdout, 'buffer'):
    UTF8_CONSOLE = io.TextIOWrapper(sys.stdout.buffer,
                                    encoding='utf-8',
                                    errors='replace')

_console_level: int = logging.INFO


def prune_old_logs(max_logs: int = 15) -> None:
    """
    Deletes the oldest log files so only the newest `max_logs` remain.
    """
    search_pattern = os.path.join(LOCAL_LOG_PATH, "inflowlab_*.log")
    log_files = glob.glob(search_pattern)
    log_files.sort(key=os.path.getmtime)

    if len(log_files) > max_logs:
        for old_file in log_files[:-max_logs]:
            try:
                os.remove(old_file)
            except OSError:
                pass


def get_logger(name: str | None) -> Logger:
    """
    Creates or retrieves a logger instance.
    """
    logger = logging.getLogger(name)
    logger.propagate = False

    if not logger.handlers:
        logger.setLevel(logging.DEBUG)
        formatter = logging.Formatter(CLEAN_FORMAT)

        prune_old_logs(max_logs=15)

        file_handler = logging.FileHandler(LOG_PATH,
                                           mode='a',
                                           encoding='utf-8')
        file_handler.setLevel(logging.INFO)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        console_handler = logging.StreamHandler(UTF8_CONSOLE)
        console_handler.setLevel(_console_level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    return logger


def set_console_level(level: int) -> None:
    """
    Applies `level` to the console handler of every package logger,
    including loggers created later in the session.
    """
    global _console_level  # pylint: disable=global-statement
    _console_level = level
    for name, logger in logging.Logger.manager.loggerDict.items():
        if not name.startswith(_PACKAGE_PREFIX) or not isinstance(logger, Logger):
            continue
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler) \
                    and not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)


# Ensure buffers are flushed and files are unlocked when the program/test ends
@atexit.register
def _cleanup_logging() -> None:
    logging.shutdown()
