from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from ..errors import InvalidQuery

YEAR_MIN = 1900
YEAR_MAX = 2100


class DocType(Enum):
    ARTICLE = "Article"
    REVIEW = "Review"
    OTHER = "Other"

    @classmethod
    def from_text(cls, text: str | None) -> "DocType":
        """Map a WOS `DT` value ("Article; Proceedings Paper") to the enum."""
        if not text:
            return cls.OTHER
        head = text.split(";", 1)[0].strip().lower()
        for member in cls:
            if member.value.lower() == head:
                return member
        return cls.OTHER


@dataclass(frozen=True)
class Affiliation:
    institution: str
    city: str = ""
    country: str = ""


@dataclass(frozen=True)
class ParsedRef:
    first_author: str
    year: int
    source_abbrev: str
    volume: Optional[str] = None
    start_page: Optional[str] = None
    doi: Optional[str] = None


@dataclass(frozen=True)
class RefString:
    raw: str
    parsed: Optional[ParsedRef] = None

    def __post_init__(self):
        if not self.raw or not self.raw.strip():
            raise ValueError("RefString.raw must not be empty")


@dataclass(frozen=True)
class BibRecord:
    """One bibliographic record as exported by WOS (or an equivalent JSON source)."""

    record_id: str
    title: str
    abstract: Optional[str] = None
    authors: Tuple[Tuple[str, str], ...] = ()
    source: str = ""
    doc_type: DocType = DocType.OTHER
    year: Optional[int] = None
    cited_refs: Tuple[RefString, ...] = ()
    times_cited: int = 0
    affiliations: Tuple[Affiliation, ...] = ()
    keywords: Tuple[str, ...] = ()
    source_abbrev: str = ""
    volume: Optional[str] = None
    start_page: Optional[str] = None
    doi: Optional[str] = None
    extra: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()

    def __post_init__(self):
        if not self.record_id:
            raise ValueError("record_id must not be empty")
        if self.times_cited < 0:
            raise ValueError(f"{self.record_id}: times_cited must be >= 0")
        if self.year is not None and not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValueError(f"{self.record_id}: year {self.year} outside {YEAR_MIN}..{YEAR_MAX}")

    @property
    def has_address(self) -> bool:
        return bool(self.affiliations)

    @property
    def first_author_surname(self) -> str:
        return self.authors[0][0] if self.authors else ""

    @property
    def label(self) -> str:
        """Short HistCite-style node label: "Surname YEAR"."""
        name = self.first_author_surname or self.record_id
        return f"{name} {self.year}" if self.year is not None else name

    def extra_tags(self) -> Dict[str, Tuple[str, ...]]:
        return dict(self.extra)


def _check_patterns(name: str, patterns: Tuple[str, ...]) -> None:
    for pat in patterns:
        words = pat.strip().strip('"').split()
        if not words:
            raise InvalidQuery(f"{name}: empty pattern")
        for w in words:
            if "*" in w[:-1]:
                raise InvalidQuery(f"{name}: wildcard '*' allowed only at a token end: {pat!r}")


@dataclass(frozen=True)
class Query:
    """Field-level wildcard query. Empty pattern lists impose no constraint."""

    title_patterns: Tuple[str, ...] = ()
    topic_patterns: Tuple[str, ...] = ()
    doc_type: Optional[DocType] = None
    year_range: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if not self.title_patterns and not self.topic_patterns:
            raise InvalidQuery("query needs at least one title or topic pattern")
        _check_patterns("title", self.title_patterns)
        _check_patterns("topic", self.topic_patterns)
        if self.year_range is not None:
            lo, hi = self.year_range
            if lo > hi:
                raise InvalidQuery(f"year_range min {lo} > max {hi}")
