"""Logging configuration"""
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import settings

_installed: List[logging.Handler] = []


def setup_logging(log_dir: Optional[Path] = None) -> None:
    """Setup logging configuration"""

    # Create logs directory if it doesn't exist
    log_dir = Path(log_dir or settings.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)

    # Configure logging format
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    date_format = "%Y-%m-%d %H:%M:%S"

    # Create formatter
    formatter = logging.Formatter(log_format, date_format)

    # Console handler; stdout carries piped graph data and tables
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, settings.log_level.upper()))
    console_handler.setFormatter(formatter)

    # File handler
    file_handler = logging.FileHandler(
        log_dir / "lab.log",
        encoding="utf-8"
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)

    # Error file handler
    error_handler = logging.FileHandler(
        log_dir / "errors.log",
        encoding="utf-8"
    )
    error_handler.setLevel(logging.ERROR)
    error_handler.setFormatter(formatter)

    # Configure root logger, replacing handlers from an earlier call
    root_logger = logging.getLogger()
    for handler in _installed:
        root_logger.removeHandler(handler)
        handler.close()
    _installed[:] = [console_handler, file_handler, error_handler]
    root_logger.setLevel(logging.DEBUG)
    for handler in _installed:
        root_logger.addHandler(handler)

    # Reduce noise from some libraries
    logging.getLogger("aiosqlite").setLevel(logging.WARNING)
    logging.getLogger("asyncio").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
