"""
Logging setup for the broadcastkit CLI
Library modules only call logging.getLogger(__name__); handlers are installed here.
"""
import logging

from rich.console import Console
from rich.logging import RichHandler

LOG_FORMAT = "%(name)s: %(message)s"


def level_for(verbosity: int) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    if verbosity == 1:
        return logging.INFO
    return logging.WARNING


def configure_logging(verbosity: int = 0) -> logging.Logger:
    """
    Route broadcastkit logs to stderr through rich.

    Args:
        verbosity: 0 for warnings, 1 for info (-v), 2 or more for debug (-vv)

    Returns:
        logging.Logger: The package logger
    """
    logger = logging.getLogger("broadcastkit")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level_for(verbosity))
    logger.propagate = False
    return logger
