import functools
import logging
import sys
import time
from pathlib import Path
from typing import Optional

LOGGER_NAME = 'cyclic_relclass'


def setup_logger(verbose: bool = False, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger shared by the CLI, the scanner and the cache.

    Progress, cache replay and cross-check failures go to stderr; stdout is
    left to command output (tables, field reports).

    Args:
        verbose: DEBUG instead of INFO, including per-conductor progress
        log_file: Also append every record at DEBUG to this file
    """
    level = logging.DEBUG if verbose else logging.INFO
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(level)
    logger.handlers.clear()

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # Log to stderr so command output on stdout stays parseable
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_path)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.propagate = False

    return logger


def log_performance(func):
    """
    Log wall time of a scan stage at INFO, or the failure and its elapsed
    time at ERROR before re-raising.

        @log_performance
        def run(self) -> ScanReport:
            ...
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        logger = logging.getLogger(LOGGER_NAME)
        start_time = time.monotonic()

        logger.debug(f"Starting {func.__qualname__}")

        try:
            result = func(*args, **kwargs)
            duration = time.monotonic() - start_time
            logger.info(f"Completed {func.__qualname__} in {duration:.2f} seconds")
            return result

        except Exception as e:
            duration = time.monotonic() - start_time
            logger.error(f"Failed {func.__qualname__} after {duration:.2f} seconds: {str(e)}")
            raise

    return wrapper
