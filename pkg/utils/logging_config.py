# -*- coding: utf-8 -*-
"""Logging setup shared by the CLI, the orchestrator and the library modules."""

import logging
import sys
from typing import Dict, Optional

ROOT_LOGGER_NAME = "cumentropy"

_CONSOLE_FORMAT = "%(message)s"
_FILE_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    """
    Return a child logger of the toolkit root logger.

    Args:
        name: Dotted module name, e.g. "core.quadrature"

    Returns:
        Logger named "cumentropy.<name>"
    """
    return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")


def setup_logging(verbose: bool = False, log_prefix: str = "cumentropy",
                  banner_config: Optional[Dict[str, str]] = None,
                  log_to_file: bool = False,
                  console_level: Optional[int] = None) -> logging.Logger:
    """
    Configure console (stderr) and optional file logging.

    stdout is left untouched so JSON/CSV output stays machine-readable.

    Args:
        verbose: Enable DEBUG level
        log_prefix: Prefix of the timestamped log file name
        banner_config: Optional banner dict (title, version) logged at DEBUG
        log_to_file: Also write a timestamped log file under logs/
        console_level: Console threshold (default: DEBUG if verbose else INFO)

    Returns:
        The configured root logger
    """
    level = logging.DEBUG if verbose else logging.INFO
    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(level)
    root.propagate = False

    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stderr)
    if console_level is None:
        console_level = level
    console.setLevel(logging.DEBUG if verbose else console_level)
    console.setFormatter(logging.Formatter(_CONSOLE_FORMAT))
    root.addHandler(console)

    if log_to_file:
        from config.settings import Config
        Config.ensure_directories()
        file_handler = logging.FileHandler(Config.get_log_file(log_prefix), encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(_FILE_FORMAT))
        root.addHandler(file_handler)

    if banner_config:
        root.debug("%s v%s", banner_config.get("title", ""), banner_config.get("version", ""))

    return root


def cleanup_old_logs(days: Optional[int] = None) -> int:
    """
    Delete log files older than the retention period.

    Args:
        days: Retention in days (default: Config.LOG_RETENTION_DAYS)

    Returns:
        Number of files deleted
    """
    from config.settings import Config
    from utils.file_io import clean_old_files

    retention = Config.LOG_RETENTION_DAYS if days is None else days
    return clean_old_files(Config.LOGS_DIR, retention, "*.log")
