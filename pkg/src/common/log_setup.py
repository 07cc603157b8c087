"""Structured logging setup."""

import logging
import sys
from typing import Any

import structlog

VALID_FORMATS = ("structured", "json", "text")


def _stderr_logger(*args: Any) -> structlog.PrintLogger:
    # resolved per call so redirected or replaced stderr streams are honoured
    return structlog.PrintLogger(file=sys.stderr)


def configure_logging(level: str = "INFO", fmt: str = "structured") -> None:
    """Configure structlog for the process.

    Log lines go to stderr so that stdout only carries command output.

    Args:
        level: Minimum level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        fmt: ``structured``/``json`` for JSON lines, ``text`` for console output
    """
    renderer = (
        structlog.dev.ConsoleRenderer(colors=False)
        if fmt == "text"
        else structlog.processors.JSONRenderer()
    )
    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.stdlib.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        context_class=dict,
        logger_factory=_stderr_logger,
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(level.upper())
        ),
        cache_logger_on_first_use=False,
    )
