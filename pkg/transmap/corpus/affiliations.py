from __future__ import annotations

import re
from typing import List

from .models import Affiliation

_AUTHOR_BLOCK_RE = re.compile(r"^\s*\[[^\]]*\]\s*")
# "TX", "TX 77030", "AB T6G 2R3", bare postal codes; postcode words hold a digit
_REGION_RE = re.compile(r"^(?:[A-Z]{2,3}(?:\s+(?=[A-Z-]*[0-9])[A-Z0-9-]{3,10}){0,2}|[0-9][0-9 -]*)$")
_US_TAIL_RE = re.compile(r"^(?:(?P<state>[A-Z]{2})\s+)?(?:[0-9]{5}(?:-[0-9]{4})?\s+)?USA$")


def _strip_postcodes(city: str) -> str:
    words = [w for w in city.split() if not any(ch.isdigit() for ch in w)]
    return " ".join(words)


def _parse_segment(segment: str) -> Affiliation:
    fields = [f.strip() for f in segment.split(",")]
    fields = [f for f in fields if f]
    if len(fields) < 2:
        return Affiliation(institution=segment.strip())
    institution = fields[0]
    last = fields[-1]
    if _US_TAIL_RE.match(last):
        country = "USA"
        # "Houston, TX 77030 USA" -> city is the previous field;
        # "Houston, TX, USA" -> skip the state field.
        idx = len(fields) - 2
        if last == "USA" and idx >= 2 and _REGION_RE.match(fields[idx]):
            idx -= 1
    else:
        country = last
        idx = len(fields) - 2
        # a region never directly follows the institution
        while idx >= 2 and _REGION_RE.match(fields[idx]):
            idx -= 1
    city = _strip_postcodes(fields[idx]) if idx >= 1 else ""
    return Affiliation(institution=institution, city=city, country=country)


def normalize_affiliation(raw: str | None) -> List[Affiliation]:
    """Split a WOS `C1` line into one Affiliation per `;`-separated address segment.

    An optional leading `[Author, A; Author, B]` block is dropped. Segments that
    cannot be split into fields keep the raw text as institution.
    """
    if not raw:
        return []
    text = _AUTHOR_BLOCK_RE.sub("", raw)
    out: List[Affiliation] = []
    for segment in text.split(";"):
        segment = segment.strip().rstrip(".").strip()
        if not segment:
            continue
        out.append(_parse_segment(segment))
    return out
