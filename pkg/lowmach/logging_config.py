import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Dict, Optional

from .config import Settings, get_settings


def configure_logging(settings: Optional[Settings] = None) -> Dict[str, Any]:
    """Configure logging for lowmach runs.

    Args:
        settings: runtime settings; the cached settings are used when omitted

    Returns:
        Dict: Logging configuration dictionary for ``logging.config.dictConfig``
    """
    settings = settings or get_settings()
    log_path = Path(settings.log_dir)
    log_path.mkdir(parents=True, exist_ok=True)

    log_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "default": {
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
            "json": {
                "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
                "format": "%(asctime)s %(name)s %(levelname)s %(message)s",
            },
        },
        "handlers": {
            "console": {
                "level": settings.log_level,
                "class": "logging.StreamHandler",
                "formatter": "default",
                "stream": sys.stderr,
            },
            "file": {
                "level": settings.log_level,
                "class": "logging.handlers.RotatingFileHandler",
                "formatter": "json" if settings.json_logs else "default",
                "filename": str(log_path / "lowmach.log"),
                "maxBytes": 10485760,  # 10MB
                "backupCount": 5,
                "encoding": "utf-8",
            },
        },
        "loggers": {
            "lowmach": {
                "handlers": ["console", "file"],
                "level": settings.log_level,
                "propagate": False,
            },
            "matplotlib": {
                "handlers": ["console"],
                "level": "WARNING",
                "propagate": False,
            },
        },
    }

    return log_config


def setup_logging(settings: Optional[Settings] = None) -> None:
    """Apply :func:`configure_logging` to the logging module."""
    logging.config.dictConfig(configure_logging(settings))


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the specified name.

    Args:
        name: Name for the logger

    Returns:
        logging.Logger: Configured logger instance
    """
    return logging.getLogger(f"lowmach.{name}")
