"""
Logging configuration for the metnet analysis pipeline.
"""
import os
import logging
import json
from datetime import datetime, timezone
from typing import Optional


_EXTRA_FIELDS = ("stage", "replicate", "seed", "elapsed_ms", "n_vertices",
                 "n_edges", "count", "path", "digest")


class MetnetFormatter(logging.Formatter):
    """JSON formatter for analysis logs."""

    def format(self, record):
        log_entry = {
            'timestamp': datetime.now(timezone.utc).isoformat().replace('+00:00', 'Z'),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno
        }

        for field in _EXTRA_FIELDS:
            if hasattr(record, field):
                log_entry[field] = getattr(record, field)

        return json.dumps(log_entry, default=str)


def setup_logging(log_level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Setup logging for the pipeline.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional log file path

    Returns:
        The configured ``metnet`` logger; module loggers are its children.
    """
    level = (log_level or os.getenv('LOG_LEVEL', 'INFO')).upper()

    logger = logging.getLogger('metnet')
    logger.setLevel(getattr(logging, level))

    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    # stderr keeps stdout free for subcommand output
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, level))

    if os.getenv('LOG_FORMAT', 'json') == 'json':
        formatter = MetnetFormatter()
    else:
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )

    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(getattr(logging, level))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False

    return logger


def log_stage(logger: logging.Logger, stage: str, elapsed_ms: int, **kwargs):
    """
    Log completion of one analysis stage.

    Args:
        logger: Logger instance
        stage: Stage name (e.g. "motifs", "curvature")
        elapsed_ms: Wall time spent in the stage
        **kwargs: Additional structured fields (n_vertices, n_edges, count, ...)
    """
    extra = {'stage': stage, 'elapsed_ms': elapsed_ms, **kwargs}
    logger.info(f"Stage finished: {stage}", extra=extra)


def log_input(logger: logging.Logger, path: str, digest: str):
    """Log an input file together with its content digest."""
    logger.info(f"Read input {path}", extra={'path': path, 'digest': digest})
