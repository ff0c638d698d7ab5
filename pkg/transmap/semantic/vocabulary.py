from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import IO, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from ..errors import MalformedRow, MissingInputFile
from ..text import fold_surface

logger = logging.getLogger(__name__)

Source = Union[str, IO[str]]

HEADER_FIELD = "term_id"


class VocabSource(Enum):
    MESH = "MESH"
    GO = "GO"


class TermClass(Enum):
    CLINICAL = "Clinical"
    NONCLINICAL = "NonClinical"


@dataclass(frozen=True)
class VocabTerm:
    term_id: str
    preferred_label: str
    synonyms: Tuple[str, ...] = ()
    source: VocabSource = VocabSource.MESH
    tree_numbers: Tuple[str, ...] = ()

    def surfaces(self) -> List[str]:
        forms = []
        for text in (self.preferred_label, *self.synonyms):
            key = fold_surface(text)
            if key and key not in forms:
                forms.append(key)
        return forms


@dataclass(frozen=True)
class VocabularyIndex:
    terms: Dict[str, VocabTerm] = field(default_factory=dict)
    surface_index: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    clinical_prefixes: Dict[str, str] = field(default_factory=dict)
    max_tokens: int = 0

    def __len__(self) -> int:
        return len(self.terms)

    def lookup(self, surface: str) -> Optional[str]:
        """Winning term for a folded surface: MESH before GO, then smallest term_id."""
        ids = self.surface_index.get(surface)
        if not ids:
            return None
        return ids[0]

    def classify(self, term_id: str) -> TermClass:
        return classify_term(self.terms[term_id], self.clinical_prefixes)


def classify_term(term: VocabTerm, clinical_prefixes: Iterable[str]) -> TermClass:
    if term.source is VocabSource.GO:
        return TermClass.NONCLINICAL
    prefixes = tuple(clinical_prefixes)
    for tn in term.tree_numbers:
        if tn.startswith(prefixes):
            return TermClass.CLINICAL
    return TermClass.NONCLINICAL


def _open_text(src: Source) -> Tuple[IO[str], str, bool]:
    if isinstance(src, str):
        try:
            return open(src, "r", encoding="utf-8", newline=""), src, True
        except FileNotFoundError:
            raise MissingInputFile(src) from None
    return src, getattr(src, "name", "<stream>"), False


def _rows(src: Source) -> Iterator[Tuple[int, List[str], str]]:
    fh, name, owned = _open_text(src)
    try:
        reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
        for row in reader:
            line = reader.line_num
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            yield line, [c.strip() for c in row], name
    finally:
        if owned:
            fh.close()


def _split(cell: str) -> Tuple[str, ...]:
    return tuple(p.strip() for p in cell.split(";") if p.strip())


def load_clinical_prefixes(src: Optional[Source] = None) -> Dict[str, str]:
    """Read `prefix<TAB>category` lines; None loads the bundled default list."""
    if src is None:
        text = resources.files("transmap.data").joinpath("clinical_prefixes.txt").read_text(encoding="utf-8")
        src = io.StringIO(text)
    out: Dict[str, str] = {}
    for line, row, name in _rows(src):
        if len(row) != 2 or not row[0] or not row[1]:
            raise MalformedRow("expected 'prefix<TAB>category'", line=line, source=name)
        out[row[0]] = row[1]
    return out


def _term_from_row(line: int, row: List[str], name: str) -> VocabTerm:
    if len(row) not in (4, 5):
        raise MalformedRow(f"expected 4 or 5 tab-separated columns, got {len(row)}", line=line, source=name)
    term_id, source, label, trees = row[:4]
    synonyms = _split(row[4]) if len(row) == 5 else ()
    if not term_id or not label:
        raise MalformedRow("term_id and preferred_label are required", line=line, source=name)
    try:
        kind = VocabSource(source.upper())
    except ValueError:
        raise MalformedRow(f"unknown source {source!r}", line=line, source=name) from None
    tree_numbers = _split(trees)
    if kind is VocabSource.GO and tree_numbers:
        raise MalformedRow(f"GO term {term_id} carries tree numbers", line=line, source=name)
    if kind is VocabSource.MESH and not tree_numbers:
        raise MalformedRow(f"MESH term {term_id} has no tree number", line=line, source=name)
    return VocabTerm(term_id, label, synonyms, kind, tree_numbers)


def load_vocabulary(src: Optional[Source] = None, clinical_prefixes: Optional[Mapping[str, str]] = None) -> VocabularyIndex:
    """Build a VocabularyIndex from the vocabulary TSV.

    Columns: term_id, source, preferred_label, tree_numbers, synonyms (the last
    two `;`-separated). A first row starting with `term_id` is a header; `#`
    lines are comments. `src=None` loads the bundled vocabulary.
    """
    if src is None:
        text = resources.files("transmap.data").joinpath("vocabulary.tsv").read_text(encoding="utf-8")
        src = io.StringIO(text)
    prefixes = dict(clinical_prefixes) if clinical_prefixes is not None else load_clinical_prefixes()
    terms: Dict[str, VocabTerm] = {}
    first = True
    for line, row, name in _rows(src):
        if first and row[0] == HEADER_FIELD:
            first = False
            continue
        first = False
        term = _term_from_row(line, row, name)
        if term.term_id in terms:
            raise MalformedRow(f"duplicate term_id {term.term_id}", line=line, source=name)
        terms[term.term_id] = term

    buckets: Dict[str, List[VocabTerm]] = {}
    for term in terms.values():
        for key in term.surfaces():
            buckets.setdefault(key, []).append(term)
    order = {VocabSource.MESH: 0, VocabSource.GO: 1}
    surface_index = {
        key: tuple(t.term_id for t in sorted(ts, key=lambda t: (order[t.source], t.term_id)))
        for key, ts in sorted(buckets.items())
    }
    shared = sum(1 for ids in surface_index.values() if len(ids) > 1)
    if shared:
        logger.debug("%d surface forms map to more than one term", shared)
    max_tokens = max((len(k.split(" ")) for k in surface_index), default=0)
    logger.info("vocabulary: %d terms, %d surface forms", len(terms), len(surface_index))
    return VocabularyIndex(terms, surface_index, prefixes, max_tokens)
