"""
Engulfing toolkit factory.

Numerical laboratory for the engulfing property of convex functions:
Bregman gaps, sections, sampled soft/full engulfing checks and the
characterization constant.
"""
import logging
from typing import Optional

from .config import get_config
from .helpers.logging_config import setup_logging

__version__ = '1.0.0'


def init_toolkit(config_name: Optional[str] = None, log_level: Optional[str] = None):
    """
    Toolkit factory function.

    Args:
        config_name: Configuration name (default, development, production, testing);
            ENGULF_ENV when omitted
        log_level: Overrides the configured log level

    Returns:
        Selected Config class
    """
    cfg = get_config(config_name)

    setup_logging(
        log_level=log_level or cfg.LOG_LEVEL,
        log_file=cfg.LOG_FILE,
        use_json_format=cfg.LOG_JSON
    )

    logger = logging.getLogger(__name__)
    logger.debug(f"Engulfing toolkit {__version__} initialised with config: {cfg.__name__}")
    for warning in cfg.validate_config():
        logger.warning(f"Configuration warning: {warning}")

    return cfg
