from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from ..errors import MissingInputFile, UnknownFormat
from .jsonio import parse_corpus_json
from .models import BibRecord
from .wos import parse_wos_export

logger = logging.getLogger(__name__)

PARSERS: Dict[str, Callable[..., List[BibRecord]]] = {
    "wos": parse_wos_export,
    "json": parse_corpus_json,
}


def parse_file(path: str, fmt: str = "wos") -> List[BibRecord]:
    parser = PARSERS.get(fmt)
    if parser is None:
        raise UnknownFormat(f"unknown corpus format {fmt!r}; expected one of {sorted(PARSERS)}")
    if not os.path.exists(path):
        raise MissingInputFile(path)
    with open(path, "rb") as f:
        return parser(f.read(), source=path)


def ingest_files(paths: Sequence[str], fmt: str = "wos", workers: Optional[int] = None) -> List[BibRecord]:
    """Parse several export files concurrently and concatenate them in argument order.

    A record id repeated across files keeps its first occurrence.
    """
    if fmt not in PARSERS:
        raise UnknownFormat(f"unknown corpus format {fmt!r}; expected one of {sorted(PARSERS)}")
    for p in paths:
        if not os.path.exists(p):
            raise MissingInputFile(p)
    if len(paths) <= 1 or workers == 1:
        parsed = [parse_file(p, fmt) for p in paths]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parsed = list(pool.map(lambda p: parse_file(p, fmt), paths))
    out: List[BibRecord] = []
    seen = set()
    for path, records in zip(paths, parsed):
        dropped = 0
        for r in records:
            if r.record_id in seen:
                dropped += 1
                continue
            seen.add(r.record_id)
            out.append(r)
        if dropped:
            logger.warning("%s: %d record(s) already seen in an earlier file were dropped", path, dropped)
    logger.info("ingested %d record(s) from %d file(s)", len(out), len(paths))
    return out
