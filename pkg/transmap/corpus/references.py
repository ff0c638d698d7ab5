from __future__ import annotations

import re
from typing import Optional

from .models import ParsedRef, RefString

_YEAR_RE = re.compile(r"^(1[89]|20|21)[0-9]{2}$")
_INITIALS_RE = re.compile(r"^[A-Z]{1,3}$")


def ref_surname(author: str) -> str:
    """Surname part of a cited-reference author ("VAN DER BERG J" -> "VAN DER BERG")."""
    words = author.replace(".", " ").split()
    if len(words) >= 2 and _INITIALS_RE.match(words[-1]):
        words = words[:-1]
    return " ".join(words)


def _clean_doi(value: str) -> Optional[str]:
    value = value.strip().strip("[]")
    first = value.split(",", 1)[0].strip()
    return first.lower() or None


def parse_reference(raw: str) -> RefString:
    """Parse a WOS `CR` line: `AUTHOR, YEAR, SOURCE[, Vn][, Pn][, DOI x]`.

    Lines without author, a 4-digit year and a source keep `parsed=None`.
    """
    raw = raw.strip()
    parts = [p.strip() for p in raw.split(", ")]
    if len(parts) < 3 or not parts[0] or not _YEAR_RE.match(parts[1]) or not parts[2]:
        return RefString(raw=raw)
    volume = page = doi = None
    for p in parts[3:]:
        upper = p.upper()
        if upper.startswith("DOI "):
            doi = _clean_doi(p[4:])
        elif len(p) > 1 and upper[0] == "V" and volume is None:
            volume = p[1:].strip()
        elif len(p) > 1 and upper[0] == "P" and page is None:
            page = p[1:].strip()
    parsed = ParsedRef(
        first_author=parts[0],
        year=int(parts[1]),
        source_abbrev=parts[2],
        volume=volume or None,
        start_page=page or None,
        doi=doi,
    )
    return RefString(raw=raw, parsed=parsed)
