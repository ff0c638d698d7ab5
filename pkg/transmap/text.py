from __future__ import annotations

import re
import unicodedata
from typing import List

# Words, keeping intra-word hyphens ("non-small", "anti-tumor").
_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)
_NON_ALNUM_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str | None) -> List[str]:
    """Lowercased tokens split on whitespace and punctuation except intra-word hyphens."""
    if not text:
        return []
    return [t.lower() for t in _TOKEN_RE.findall(text)]


def fold_surface(text: str) -> str:
    """Canonical surface form used for dictionary lookup: tokens joined by one space."""
    return " ".join(tokenize(text))


def strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def fold_key(text: str | None) -> str:
    """Case/diacritic/punctuation folding for exact-key matching ("Ranson" == "RANSON")."""
    if not text:
        return ""
    return _NON_ALNUM_RE.sub("", strip_diacritics(text).lower())


def fold_name(text: str | None) -> str:
    """Like fold_key but keeps single spaces between words (institution names)."""
    if not text:
        return ""
    return " ".join(_NON_ALNUM_RE.sub(" ", strip_diacritics(text).lower()).split())
