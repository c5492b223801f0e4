# symchain/utils/logger.py
import logging
from typing import Optional

from symchain.config import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """Configure the root handler once, from the CLI entry point only."""
    logging.basicConfig(level=(level or LOG_LEVEL).upper(), format=LOG_FORMAT)
    return logging.getLogger("symchain")
