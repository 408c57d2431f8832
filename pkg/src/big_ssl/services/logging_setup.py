import logging
from pathlib import Path
from typing import Optional, Union

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def build_logger(name: str,
                 level: int = logging.INFO,
                 log_file: Optional[Union[str, Path]] = None,
                 console: bool = True) -> logging.Logger:
    """
    Named logger with the project formatter, an optional file handler and a
    console handler. Handlers are installed once per logger name.
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    if getattr(logger, "_big_ssl_configured", False):
        return logger

    formatter = logging.Formatter(LOG_FORMAT)
    if log_file is not None:
        file_handler = logging.FileHandler(str(log_file))
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if console:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    logger._big_ssl_configured = True
    return logger
