"""
Logging setup
"""
import sys
from typing import Optional

from loguru import logger

from teamata.core.config import config

logger.disable("teamata")


def setup_logging(level: Optional[str] = None, json: Optional[bool] = None) -> int:
    """
    Install a single stderr sink for the toolkit's log records

    Args:
        level: Minimum level; defaults to the configured one
        json: Serialise records as JSON lines

    Returns:
        The loguru handler id
    """
    level = (level or config.logging.level).upper()
    json = config.logging.json if json is None else json

    logger.remove()
    logger.enable("teamata")
    return logger.add(
        sys.stderr,
        level=level,
        format=config.logging.format,
        serialize=json,
        backtrace=False,
        diagnose=False,
    )
