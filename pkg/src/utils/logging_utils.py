"""
logging_utils.py
Logging setup shared by the CLI, the automation jobs and the studies.
Console output goes through rich; an optional plain log file keeps the
same ``[YYYY-mm-dd HH:MM:SS]`` lines the job runner has always written.
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv
from rich.logging import RichHandler

load_dotenv()

DEFAULT_LEVEL = os.getenv("OVERHEAR_LOG_LEVEL", "INFO")
FILE_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def resolve_level(level: Optional[str]) -> int:
    """Map a level name (case-insensitive) to a logging constant; unknown names fall back to INFO."""
    name = (level or DEFAULT_LEVEL).upper()
    value = logging.getLevelName(name)
    return value if isinstance(value, int) else logging.INFO


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the ``src`` logger hierarchy.

    Safe to call more than once; handlers are replaced, not stacked.

    Args:
        level: Level name (DEBUG, INFO, ...). Defaults to OVERHEAR_LOG_LEVEL.
        log_file: Optional path for a plain-text copy of the log.

    Returns:
        logging.Logger: the configured package logger
    """
    logger = logging.getLogger("src")
    logger.setLevel(resolve_level(level))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console = RichHandler(rich_tracebacks=True, show_path=False, markup=False)
    console.setFormatter(logging.Formatter("%(message)s", datefmt=DATE_FORMAT))
    logger.addHandler(console)

    if log_file:
        directory = os.path.dirname(os.path.abspath(log_file))
        os.makedirs(directory, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(file_handler)

    logger.propagate = False
    return logger
