from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..corpus.models import BibRecord
from ..errors import OutOfRange
from ..text import tokenize
from .vocabulary import TermClass, VocabularyIndex

logger = logging.getLogger(__name__)

COUNT_MODES = ("unique", "occurrences")


@dataclass(frozen=True)
class Annotation:
    record_id: str
    matched: FrozenSet[str] = frozenset()
    clinical_count: int = 0
    nonclinical_count: int = 0
    term_counts: Tuple[Tuple[str, int], ...] = ()
    clinical_occurrences: int = 0
    nonclinical_occurrences: int = 0

    def __post_init__(self):
        if self.clinical_count + self.nonclinical_count != len(self.matched):
            raise ValueError(f"{self.record_id}: class counts do not add up to the matched term count")

    @property
    def is_empty(self) -> bool:
        return not self.matched

    def to_dict(self) -> Dict[str, Any]:
        return {
            "matched": sorted(self.matched),
            "clinical_count": self.clinical_count,
            "nonclinical_count": self.nonclinical_count,
            "clinical_occurrences": self.clinical_occurrences,
            "nonclinical_occurrences": self.nonclinical_occurrences,
            "term_counts": dict(self.term_counts),
            "clinical_ratio": clinical_ratio(self),
        }

    @classmethod
    def from_dict(cls, record_id: str, data: Mapping[str, Any]) -> "Annotation":
        counts = data.get("term_counts") or {}
        return cls(
            record_id=record_id,
            matched=frozenset(data.get("matched", [])),
            clinical_count=int(data.get("clinical_count", 0)),
            nonclinical_count=int(data.get("nonclinical_count", 0)),
            term_counts=tuple(sorted((str(k), int(v)) for k, v in counts.items())),
            clinical_occurrences=int(data.get("clinical_occurrences", 0)),
            nonclinical_occurrences=int(data.get("nonclinical_occurrences", 0)),
        )


def match_terms(tokens: Sequence[str], vocab: VocabularyIndex) -> List[str]:
    """Greedy longest non-overlapping matches, left to right; one entry per occurrence."""
    hits: List[str] = []
    i, n = 0, len(tokens)
    while i < n:
        for width in range(min(vocab.max_tokens, n - i), 0, -1):
            term_id = vocab.lookup(" ".join(tokens[i:i + width]))
            if term_id is not None:
                hits.append(term_id)
                i += width
                break
        else:
            i += 1
    return hits


def annotate_document(rec: BibRecord, vocab: VocabularyIndex) -> Annotation:
    """Tag title then abstract; a match never spans the two fields."""
    counts: Dict[str, int] = {}
    for text in (rec.title, rec.abstract):
        for term_id in match_terms(tokenize(text), vocab):
            counts[term_id] = counts.get(term_id, 0) + 1
    clinical = {t for t in counts if vocab.classify(t) is TermClass.CLINICAL}
    return Annotation(
        record_id=rec.record_id,
        matched=frozenset(counts),
        clinical_count=len(clinical),
        nonclinical_count=len(counts) - len(clinical),
        term_counts=tuple(sorted(counts.items())),
        clinical_occurrences=sum(counts[t] for t in clinical),
        nonclinical_occurrences=sum(c for t, c in counts.items() if t not in clinical),
    )


def annotate_corpus(records: Sequence[BibRecord], vocab: VocabularyIndex, workers: Optional[int] = None) -> Dict[str, Annotation]:
    if workers and workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(lambda r: annotate_document(r, vocab), records))
    else:
        done = [annotate_document(r, vocab) for r in records]
    empty = sum(1 for a in done if a.is_empty)
    if empty:
        logger.info("%d of %d documents matched no vocabulary term", empty, len(done))
    return {a.record_id: a for a in done}


def clinical_ratio(a: Annotation, count: str = "unique") -> Optional[float]:
    """Share of clinical terms; None when nothing matched."""
    if count not in COUNT_MODES:
        raise OutOfRange(f"count mode must be one of {COUNT_MODES}, got {count!r}")
    if count == "unique":
        clin, total = a.clinical_count, a.clinical_count + a.nonclinical_count
    else:
        clin, total = a.clinical_occurrences, a.clinical_occurrences + a.nonclinical_occurrences
    if total == 0:
        return None
    return clin / total


def annotations_to_json(annotations: Mapping[str, Annotation]) -> bytes:
    body = {rid: annotations[rid].to_dict() for rid in sorted(annotations)}
    return (json.dumps(body, indent=2, sort_keys=True) + "\n").encode("utf-8")


def annotations_from_json(data: bytes | str) -> Dict[str, Annotation]:
    body = json.loads(data)
    return {str(rid): Annotation.from_dict(str(rid), item) for rid, item in body.items()}
