"""Logging configuration for willmore_tori."""

import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Dict, Optional

LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


def get_logging_config(
    log_dir: Path = Path("logs"),
    max_file_size: int = 10485760,
    backup_count: int = 5,
) -> Dict[str, Any]:
    """Get logging configuration dictionary."""

    log_dir.mkdir(parents=True, exist_ok=True)

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "detailed": {
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s",
                "datefmt": "%Y-%m-%d %H:%M:%S",
            },
            "simple": {"format": "%(levelname)s - %(name)s - %(message)s"},
            "json": {
                "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
                "format": "%(asctime)s %(name)s %(levelname)s %(funcName)s %(lineno)d %(message)s",
            },
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": "INFO",
                "formatter": "simple",
                "stream": sys.stderr,
            },
            "file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "DEBUG",
                "formatter": "detailed",
                "filename": str(log_dir / "willmore.log"),
                "maxBytes": max_file_size,
                "backupCount": backup_count,
                "encoding": "utf8",
            },
            "error_file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "ERROR",
                "formatter": "detailed",
                "filename": str(log_dir / "error.log"),
                "maxBytes": max_file_size,
                "backupCount": backup_count,
                "encoding": "utf8",
            },
            "report_file": {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "INFO",
                "formatter": "json",
                "filename": str(log_dir / "reports.jsonl"),
                "maxBytes": max_file_size // 2,
                "backupCount": 3,
                "encoding": "utf8",
            },
        },
        "loggers": {
            "willmore_tori": {
                "level": "DEBUG",
                "handlers": ["console", "file", "error_file"],
                "propagate": False,
            },
            "willmore_tori.cli_reports": {
                "level": "INFO",
                "handlers": ["console", "report_file", "error_file"],
                "propagate": False,
            },
        },
        "root": {"level": "WARNING", "handlers": ["console"]},
    }


def setup_logging(
    log_level: str = "INFO",
    console_level: Optional[str] = None,
    loggers: Optional[Dict[str, str]] = None,
    log_dir: Path = Path("logs"),
    max_file_size: int = 10485760,
    backup_count: int = 5,
) -> None:
    """
    Setup logging configuration.

    Args:
        log_level: Level of the package logger (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        console_level: Level of the console handler, defaults to log_level
        loggers: Per-logger level overrides, e.g. {"willmore_tori.variational": "DEBUG"}
        log_dir: Directory for the rotating log files
    """
    config = get_logging_config(log_dir, max_file_size, backup_count)

    if log_level.upper() in LEVELS:
        config["loggers"]["willmore_tori"]["level"] = log_level.upper()
    console = (console_level or log_level).upper()
    if console in LEVELS:
        config["handlers"]["console"]["level"] = console

    for name, level in (loggers or {}).items():
        if level.upper() not in LEVELS:
            continue
        if name in config["loggers"]:
            config["loggers"][name]["level"] = level.upper()
        else:
            config["loggers"][name] = {"level": level.upper()}

    logging.config.dictConfig(config)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Logger instance
    """
    return logging.getLogger(name)
