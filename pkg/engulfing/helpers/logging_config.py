"""
Logging configuration and utilities for the toolkit.
"""
import json
import logging
import sys
import traceback
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

# One id per process; every record of a CLI invocation carries it.
_RUN_ID = uuid.uuid4().hex[:12]


def get_run_id() -> str:
    """Correlation id of the current process run."""
    return _RUN_ID


class RunIDFilter(logging.Filter):
    """Add the run id to log records."""

    def filter(self, record):
        record.run_id = _RUN_ID
        return True


class StructuredFormatter(logging.Formatter):
    """Formatter that outputs structured JSON logs."""

    def format(self, record):
        log_data = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'run_id': getattr(record, 'run_id', _RUN_ID),
            'message': record.getMessage(),
        }

        if record.exc_info:
            log_data['exception'] = self.formatException(record.exc_info)

        if hasattr(record, 'extra_fields'):
            log_data['extra'] = record.extra_fields

        return json.dumps(log_data, ensure_ascii=False, default=str)


class HumanReadableFormatter(logging.Formatter):
    """Formatter for human-readable logs with the run id."""

    def __init__(self):
        super().__init__('%(asctime)s - %(name)s - %(levelname)s - [RUN:%(run_id)s] - %(message)s')

    def format(self, record):
        if not hasattr(record, 'run_id'):
            record.run_id = _RUN_ID
        return super().format(record)


def setup_logging(log_level: str = "INFO", log_file: Optional[Path] = None,
                  use_json_format: bool = False) -> None:
    """
    Setup logging with a console handler and an optional file handler.

    Console output goes to stderr so CLI payloads on stdout stay clean.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Path to log file
        use_json_format: Use structured JSON format for logs
    """
    level = getattr(logging, log_level.upper(), logging.INFO)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    formatter = StructuredFormatter() if use_json_format else HumanReadableFormatter()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    console_handler.addFilter(RunIDFilter())
    root_logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        file_handler.addFilter(RunIDFilter())
        root_logger.addHandler(file_handler)


def log_operation(logger: logging.Logger, operation: str, details: Optional[Dict[str, Any]] = None) -> None:
    """
    Log an operation with contextual information.

    Args:
        logger: Logger instance
        operation: Operation name
        details: Optional additional details
    """
    log_data = {
        'operation': operation,
        'run_id': _RUN_ID,
        'details': details or {}
    }
    logger.info(f"OPERATION: {json.dumps(log_data, ensure_ascii=False, default=str)}",
                extra={'extra_fields': log_data})


def log_error_with_context(logger: logging.Logger, error: Exception, context: Optional[Dict[str, Any]] = None) -> None:
    """
    Log an error with contextual information.

    Args:
        logger: Logger instance
        error: Exception that occurred
        context: Optional context information
    """
    error_data = {
        'error': str(error),
        'error_type': type(error).__name__,
        'run_id': _RUN_ID,
        'context': context or {},
        'traceback': traceback.format_exc()
    }
    logger.error(f"ERROR: {json.dumps(error_data, ensure_ascii=False, default=str)}",
                 extra={'extra_fields': error_data})
