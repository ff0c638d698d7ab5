from __future__ import annotations

import logging
import os
from typing import Optional

LOG_ENV = "TRANSMAP_LOG"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def resolve_level(value: Optional[str], verbose: int = 0) -> int:
    """Map TRANSMAP_LOG (name or number) and -v counts to a logging level."""
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    if not value:
        return logging.WARNING
    value = value.strip()
    if value.isdigit():
        return int(value)
    level = logging.getLevelName(value.upper())
    return level if isinstance(level, int) else logging.WARNING


def configure_logging(verbose: int = 0) -> int:
    level = resolve_level(os.environ.get(LOG_ENV), verbose)
    root = logging.getLogger("transmap")
    if not any(getattr(h, "_transmap", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._transmap = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.setLevel(level)
    return level
