"""Provides centralized logging configuration for the mechanism designer."""

import logging

from colorlog import ColoredFormatter

# Define colors for different log levels
log_colors = {
    'DEBUG': 'white',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'bold_red',
}

# Custom formatter with colored output
detailed_formatter = ColoredFormatter(
    '%(module)s.%(funcName)s:%(lineno)d >>> %(log_color)s%(asctime)s - %(levelname)s - %(message)s',
    datefmt='%d/%m/%Y %H:%M:%S',
    log_colors=log_colors,
)

# Loggers handed out so far, so the level can be changed for all of them at once
_configured_loggers = set()


def setup_logger(logger_name):
    """
    Set up a logger instance with the specified name using the configured ColoredFormatter.

    Only the root logger gets a console handler; module loggers propagate to it.
    The handler writes to stderr, stdout is reserved for reports.

    Attributes:
        logger_name (str): The name of the logger instance.

    Returns:
        logging.Logger: The configured logger instance.
    """
    logger = logging.getLogger(logger_name)
    logger.setLevel(logging.INFO)
    _configured_loggers.add(logger_name)

    if logger_name == 'root' and not any(
        getattr(handler, 'formatter', None) is detailed_formatter for handler in logger.handlers
    ):
        # Stream handler for console
        stream_handler = logging.StreamHandler()
        stream_handler.setFormatter(detailed_formatter)
        logger.addHandler(stream_handler)

    return logger


def set_log_level(level):
    """
    Change the level of every logger created through setup_logger.

    Attributes:
        level (int | str): A logging level, e.g. logging.DEBUG or 'WARNING'.
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    for logger_name in _configured_loggers:
        logging.getLogger(logger_name).setLevel(level)
