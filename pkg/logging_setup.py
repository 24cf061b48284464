"""Logging for crystal-automaton: reports on stdout, log lines on stderr."""

import logging
import sys
from pathlib import Path

LOGGER_NAME = "crystal_automaton"

CONSOLE_LEVELS = {-1: logging.WARNING, 0: logging.INFO, 1: logging.DEBUG}
FILE_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


def _console_handler(verbosity: int) -> logging.Handler:
    level = CONSOLE_LEVELS[max(-1, min(1, verbosity))]
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)
    # Level names only help when debug lines are interleaved.
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s" if level == logging.DEBUG else "%(message)s"))
    return handler


def _file_handler(log_file: Path) -> logging.Handler:
    handler = logging.FileHandler(log_file, mode="a")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    return handler


def setup_logging(
    verbosity: int = 0,
    log_file: Path | None = None,
) -> logging.Logger:
    """Attach fresh handlers to the crystal_automaton logger.

    stdout stays free for reports, so identical experiments print identical bytes.

    Args:
        verbosity: -1 keeps warnings and errors, 0 adds info, 1 adds debug lines
        log_file: Also append every record, debug included, to this file

    Returns:
        The configured logger
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)
    logger.handlers.clear()
    logger.addHandler(_console_handler(verbosity))
    if log_file:
        logger.addHandler(_file_handler(log_file))
    return logger


def get_logger() -> logging.Logger:
    return logging.getLogger(LOGGER_NAME)


def write_progress(message: str) -> None:
    """Rewrite the batch progress line in place on stderr."""
    sys.stderr.write(f"\r{message}")
    sys.stderr.flush()
