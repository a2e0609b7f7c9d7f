"""Unified logging for informa."""

import os
import json
import logging
from logging.handlers import RotatingFileHandler

LOG_FILE_PATH = os.path.expanduser(
    os.getenv("INFORMA_LOG_PATH", "~/.local/state/informa/informa.log")
)


def setup_logging() -> logging.Logger:
    """Configure the informa logger for structured JSON logging."""
    logger = logging.getLogger("informa")
    logger.setLevel(logging.INFO)

    if not logger.handlers:
        log_dir = os.path.dirname(LOG_FILE_PATH)
        try:
            os.makedirs(log_dir, exist_ok=True)
            handler: logging.Handler = RotatingFileHandler(
                LOG_FILE_PATH, maxBytes=10 * 1024 * 1024, backupCount=5
            )
        except OSError:
            # read-only home: records are dropped
            handler = logging.NullHandler()
        formatter = logging.Formatter(
            '{"timestamp": "%(asctime)s", "level": "%(levelname)s", "data": %(message)s}'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.propagate = False

    return logger


def log_event(event_type: str, data: dict) -> None:
    """Log a structured event to the informa logger."""
    logger = logging.getLogger("informa")
    if not logger.handlers:
        setup_logging()

    log_message = json.dumps({"event_type": event_type, **data}, default=str)
    logger.info(log_message)
