"""Logging for solver runs: JSON lines on stderr unless configured otherwise."""

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict

import numpy as np

from .config import LoggingConfig


TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

DEFAULT_LOG_FILE = "./logs/sdsp_brm.log"


def _jsonable(value: Any) -> Any:
    """Fallback for json.dumps: numpy scalars and arrays, then repr."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return repr(value)


class JSONFormatter(logging.Formatter):
    """One JSON object per record; structured fields come from extra={"extra": {...}}."""

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if hasattr(record, "extra"):
            log_data.update(record.extra)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=_jsonable)


def _build_handler(config: LoggingConfig) -> logging.Handler:
    if config.output == "file":
        log_path = Path(config.file_path or DEFAULT_LOG_FILE)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        return logging.FileHandler(log_path)
    if config.output == "stdout":
        return logging.StreamHandler(sys.stdout)
    # stdout carries command summaries
    return logging.StreamHandler(sys.stderr)


def setup_logging(config: LoggingConfig) -> None:
    """
    Configure the root logger from config.

    Replaces any handlers already installed, so repeated CLI calls in one
    process log once per record.

    Args:
        config: Logging configuration
    """
    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, config.level.upper()))
    root_logger.handlers.clear()

    handler = _build_handler(config)
    if config.format == "json":
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))
    root_logger.addHandler(handler)

    # OR-Tools wrappers log through absl
    logging.getLogger("absl").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Module logger; call with __name__."""
    return logging.getLogger(name)
