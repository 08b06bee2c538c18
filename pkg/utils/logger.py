"""
Centralized logging configuration for the signed consensus analysis toolkit.
"""
import logging
import sys
from pathlib import Path
from logging.handlers import RotatingFileHandler

from config import BASE_DIR, LoggingConfig


def setup_logger(name, log_file=None, level=None):
    """
    Set up a logger with a console handler and an optional rotating file handler.

    Console output goes to stderr; stdout is reserved for command output.

    Args:
        name: Logger name (usually __name__)
        log_file: Path to log file, relative paths resolve against the project root (optional)
        level: Logging level (default: LoggingConfig.LOG_LEVEL)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    if level is None:
        level = getattr(logging, LoggingConfig.LOG_LEVEL, logging.INFO)
    logger.setLevel(level)

    # Prevent duplicate handlers
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file and LoggingConfig.LOG_TO_FILE:
        log_path = Path(log_file)
        if not log_path.is_absolute():
            log_path = BASE_DIR / log_path
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def set_console_level(level):
    """
    Adjust the console verbosity of every logger created by setup_logger.

    Args:
        level: Logging level applied to console handlers
    """
    for logger in list(logging.Logger.manager.loggerDict.values()):
        if not isinstance(logger, logging.Logger):
            continue
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, RotatingFileHandler):
                handler.setLevel(level)


# Default logger for the application
default_logger = setup_logger('signed_consensus', 'logs/app.log')
