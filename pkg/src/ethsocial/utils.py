import logging
import typing

LOGGER_NAME = "ethsocial"


def log(message: typing.Any, name: str = LOGGER_NAME, debug: bool = True):
    level = logging.INFO if debug else logging.WARNING
    logging.getLogger(name).log(level, str(message))


def configure_logging(verbosity: int = 0) -> None:
    """Attach a stderr handler to the package logger

    verbosity 0 only shows warnings, 1 shows info and 2 or more shows debug.
    """

    logger = logging.getLogger(LOGGER_NAME)
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
        logger.addHandler(handler)


def strip_hex_prefix(value: str) -> str:
    return value[2:] if value[:2] in ("0x", "0X") else value


def excerpt(text: str, start: int, end: int, margin: int = 20) -> str:
    """Return a single-line excerpt of `text` around the [start, end) span"""
    left = max(0, start - margin)
    right = min(len(text), end + margin)
    return " ".join(text[left:right].split())
