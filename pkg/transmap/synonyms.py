from __future__ import annotations

import os
from importlib import resources
from typing import Callable, Dict, Optional

import yaml

from .errors import ConfigParseError, MissingInputFile


def load_synonym_table(path: Optional[str], resource: str, fold: Callable[[str], str]) -> Dict[str, str]:
    """Folded variant -> canonical form, from a YAML `canonical: [variants]` mapping.

    `path=None` reads `resource` from the bundled `transmap.data` package. The
    canonical spelling maps to itself; `fold` is applied to the lookup keys only.
    """
    if path is None:
        text = resources.files("transmap.data").joinpath(resource).read_text(encoding="utf-8")
        where = resource
    else:
        if not os.path.exists(path):
            raise MissingInputFile(path)
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        where = path
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        raise ConfigParseError(f"{where}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigParseError(f"{where}: expected a mapping of canonical name to variants")
    out: Dict[str, str] = {}
    for canonical, variants in data.items():
        canonical = str(canonical)
        out[fold(canonical)] = canonical
        for v in variants or []:
            out[fold(str(v))] = canonical
    return out
