"""The ``pseudolab`` logger.

Submodules log through ``logging.getLogger(__name__)`` and reach the single
stdout handler installed here. Records do not propagate to the root logger, so
an application embedding the library sees ``pseudolab: ...`` lines only once.
"""

import logging
import sys

LOG_FORMAT = "pseudolab: %(message)s"

logger = logging.getLogger("pseudolab")


def _stdout_handler() -> logging.Handler:
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    return handler


def set_level(level: int | str) -> None:
    """Set the package level; handlers follow it.

    Args:
        level: A ``logging`` constant or its name (``"DEBUG"``, ``"WARNING"``, ...).
    """
    value = logging.getLevelName(level.upper()) if isinstance(level, str) else level
    if not isinstance(value, int):
        raise ValueError(f"unknown log level: {level}")
    logger.setLevel(value)
    for handler in logger.handlers:
        handler.setLevel(value)


if not logger.handlers:
    logger.addHandler(_stdout_handler())
    logger.propagate = False
    set_level(logging.INFO)
