"""Logging bootstrap shared by the CLI and the ablation workers."""

import logging
import os
from logging.handlers import RotatingFileHandler

from ..models.config import LoggingConfig


def configure_logging(config: LoggingConfig) -> None:
    """Install the stderr handler and, if configured, a rotating file handler."""
    root = logging.getLogger()
    root.setLevel(config.level.upper())

    for handler in list(root.handlers):
        if getattr(handler, "_kfmot_handler", False):
            root.removeHandler(handler)

    formatter = logging.Formatter(config.format)

    stream = logging.StreamHandler()
    stream.setFormatter(formatter)
    stream._kfmot_handler = True  # type: ignore[attr-defined]
    root.addHandler(stream)

    if config.file:
        log_dir = os.path.dirname(config.file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            config.file, maxBytes=config.max_bytes, backupCount=config.backup_count
        )
        file_handler.setFormatter(formatter)
        file_handler._kfmot_handler = True  # type: ignore[attr-defined]
        root.addHandler(file_handler)
