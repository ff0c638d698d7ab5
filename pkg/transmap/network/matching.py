from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..corpus.models import BibRecord, RefString
from ..corpus.references import ref_surname
from ..synonyms import load_synonym_table
from ..text import fold_key

logger = logging.getLogger(__name__)

BaseKey = Tuple[str, int, str]


@dataclass(frozen=True)
class MatchKey:
    first_author_surname: str
    year: int
    source_abbrev: str
    volume: Optional[str] = None
    start_page: Optional[str] = None
    doi: Optional[str] = None

    @property
    def base(self) -> BaseKey:
        return (self.first_author_surname, self.year, self.source_abbrev)


def load_journal_synonyms(path: Optional[str] = None) -> Dict[str, str]:
    """Folded variant -> folded canonical abbreviation (`None` loads the bundled table)."""
    table = load_synonym_table(path, "journal_synonyms.yaml", fold_key)
    return {variant: fold_key(canonical) for variant, canonical in table.items()}


def _fold_source(text: str, synonyms: Mapping[str, str]) -> str:
    folded = fold_key(text)
    return synonyms.get(folded, folded)


def _fold_opt(value: Optional[str]) -> Optional[str]:
    folded = fold_key(value) if value else ""
    return folded or None


def key_for_record(rec: BibRecord, synonyms: Optional[Mapping[str, str]] = None) -> Optional[MatchKey]:
    if rec.year is None or not rec.authors:
        return None
    return MatchKey(
        first_author_surname=fold_key(rec.first_author_surname),
        year=rec.year,
        source_abbrev=_fold_source(rec.source_abbrev or rec.source, synonyms or {}),
        volume=_fold_opt(rec.volume),
        start_page=_fold_opt(rec.start_page),
        doi=rec.doi.strip().lower() if rec.doi else None,
    )


def key_for_ref(ref: RefString, synonyms: Optional[Mapping[str, str]] = None) -> Optional[MatchKey]:
    p = ref.parsed
    if p is None:
        return None
    return MatchKey(
        first_author_surname=fold_key(ref_surname(p.first_author)),
        year=p.year,
        source_abbrev=_fold_source(p.source_abbrev, synonyms or {}),
        volume=_fold_opt(p.volume),
        start_page=_fold_opt(p.start_page),
        doi=p.doi.strip().lower() if p.doi else None,
    )


@dataclass
class ReferenceIndex:
    """Lookup tables from match keys and DOIs to record ids of the selected set."""

    synonyms: Mapping[str, str] = field(default_factory=dict)
    by_base: Dict[BaseKey, List[Tuple[str, MatchKey]]] = field(default_factory=dict)
    by_doi: Dict[str, List[str]] = field(default_factory=dict)

    def add(self, rec: BibRecord) -> None:
        key = key_for_record(rec, self.synonyms)
        if key is not None:
            self.by_base.setdefault(key.base, []).append((rec.record_id, key))
        if rec.doi:
            self.by_doi.setdefault(rec.doi.strip().lower(), []).append(rec.record_id)

    def __len__(self) -> int:
        return sum(len(v) for v in self.by_base.values())


def build_match_index(records: Sequence[BibRecord], synonyms: Optional[Mapping[str, str]] = None) -> ReferenceIndex:
    index = ReferenceIndex(synonyms=dict(synonyms or {}))
    for rec in records:
        index.add(rec)
    return index


def _compatible(ref_value: Optional[str], rec_value: Optional[str]) -> bool:
    return ref_value is None or rec_value is None or ref_value == rec_value


Ambiguity = Tuple[str, Tuple[str, ...]]


def _ambiguous(sink: Optional[List[Ambiguity]], ref: RefString, ids: Sequence[str]) -> None:
    ids = tuple(sorted(ids))
    if sink is not None:
        sink.append((ref.raw, ids))
    logger.warning("ambiguous reference %r matches %s; left unresolved", ref.raw, ", ".join(ids))


def match_reference(
    ref: RefString,
    index: ReferenceIndex,
    ambiguities: Optional[List[Ambiguity]] = None,
) -> Optional[str]:
    """Resolve a cited reference to a record id of the index, or None.

    A DOI shared by both sides wins; otherwise the (surname, year, source) key
    must agree, plus volume and start page whenever both sides carry them.
    Two or more surviving candidates leave the reference unresolved and are
    recorded in `ambiguities` when a list is given.
    """
    key = key_for_ref(ref, index.synonyms)
    if key is None:
        return None
    if key.doi:
        hits = index.by_doi.get(key.doi, [])
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            _ambiguous(ambiguities, ref, hits)
            return None
    candidates = [
        rid
        for rid, rk in index.by_base.get(key.base, [])
        if _compatible(key.volume, rk.volume)
        and _compatible(key.start_page, rk.start_page)
        and _compatible(key.doi, rk.doi)
    ]
    if len(candidates) == 1:
        return candidates[0]
    if len(candidates) > 1:
        _ambiguous(ambiguities, ref, candidates)
    return None
