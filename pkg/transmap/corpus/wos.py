from __future__ import annotations

import logging
import re
from typing import IO, Dict, List, Optional, Tuple, Union

from ..errors import DuplicateRecordId, MalformedHeader, MalformedRecord, MissingFileTerminator
from .affiliations import normalize_affiliation
from .models import Affiliation, BibRecord, DocType, RefString, YEAR_MAX, YEAR_MIN
from .references import parse_reference

logger = logging.getLogger(__name__)

_TAG_RE = re.compile(r"^[A-Z][A-Z0-9]$")
_DIGITS_RE = re.compile(r"^[0-9]+$")
CONTINUATION = "   "

# Tags mapped onto BibRecord fields; everything else lands in `extra`.
KNOWN_TAGS = frozenset(
    {"AU", "TI", "SO", "J9", "DT", "DE", "ID", "AB", "C1", "CR", "TC", "PY", "VL", "BP", "DI", "UT"}
)

Source = Union[bytes, bytearray, str, IO[bytes]]


def _decode_lines(data: Source) -> Tuple[List[str], int]:
    if hasattr(data, "read"):
        data = data.read()  # type: ignore[union-attr]
    if isinstance(data, str):
        return data.splitlines(), 0
    lines: List[str] = []
    fallbacks = 0
    for raw in bytes(data).splitlines():
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError:
            lines.append(raw.decode("latin-1"))
            fallbacks += 1
    return lines, fallbacks


def _split_author(value: str) -> Tuple[str, str]:
    if "," in value:
        surname, initials = value.split(",", 1)
        return surname.strip(), initials.strip()
    words = value.split()
    if len(words) >= 2:
        return " ".join(words[:-1]), words[-1]
    return value.strip(), ""


def _split_keywords(values: List[str]) -> List[str]:
    joined = " ".join(values)
    return [k.strip() for k in joined.split(";") if k.strip()]


class _Block:
    """Tag lines of one record between two `ER` markers."""

    def __init__(self, line: int):
        self.line = line
        self.fields: Dict[str, List[str]] = {}
        self.lines: Dict[str, int] = {}
        self.order: List[str] = []

    def add(self, tag: str, value: str, line: int) -> None:
        if tag not in self.fields:
            self.fields[tag] = []
            self.lines[tag] = line
            self.order.append(tag)
        self.fields[tag].append(value)

    def text(self, tag: str) -> str:
        return " ".join(v for v in self.fields.get(tag, []) if v).strip()

    def to_record(self, source: str) -> BibRecord:
        record_id = self.text("UT")
        if not record_id:
            raise MalformedRecord("record has no UT accession number", line=self.line, source=source)
        year: Optional[int] = None
        if "PY" in self.fields:
            py = self.text("PY")
            if not _DIGITS_RE.match(py) or not (YEAR_MIN <= int(py) <= YEAR_MAX):
                raise MalformedRecord(f"invalid PY value {py!r}", line=self.lines["PY"], source=source)
            year = int(py)
        times_cited = 0
        if "TC" in self.fields:
            tc = self.text("TC")
            if not _DIGITS_RE.match(tc):
                raise MalformedRecord(f"invalid TC value {tc!r}", line=self.lines["TC"], source=source)
            times_cited = int(tc)
        refs: List[RefString] = [parse_reference(v) for v in self.fields.get("CR", []) if v.strip()]
        affiliations: List[Affiliation] = []
        for v in self.fields.get("C1", []):
            affiliations.extend(normalize_affiliation(v))
        keywords: List[str] = []
        for tag in ("DE", "ID"):
            for k in _split_keywords(self.fields.get(tag, [])):
                if k not in keywords:
                    keywords.append(k)
        extra = tuple(
            sorted((tag, tuple(self.fields[tag])) for tag in self.order if tag not in KNOWN_TAGS)
        )
        return BibRecord(
            record_id=record_id,
            title=self.text("TI"),
            abstract=self.text("AB") or None,
            authors=tuple(_split_author(v) for v in self.fields.get("AU", []) if v.strip()),
            source=self.text("SO"),
            doc_type=DocType.from_text(self.text("DT")),
            year=year,
            cited_refs=tuple(refs),
            times_cited=times_cited,
            affiliations=tuple(affiliations),
            keywords=tuple(keywords),
            source_abbrev=self.text("J9"),
            volume=self.text("VL") or None,
            start_page=self.text("BP") or None,
            doi=self.text("DI").lower() or None,
            extra=extra,
        )


def parse_wos_export(data: Source, source: str = "<stream>") -> List[BibRecord]:
    """Parse a WOS field-tagged export (`FN`/`VR` header, `ER` per record, `EF` at the end).

    Records come back in file order. Every failure is a ParseError carrying the
    1-based line number.
    """
    lines, fallbacks = _decode_lines(data)
    if fallbacks:
        logger.info("%s: %d line(s) decoded as Latin-1", source, fallbacks)
    records: List[BibRecord] = []
    seen: Dict[str, int] = {}
    block: Optional[_Block] = None
    last_tag: Optional[str] = None
    header_seen = False
    terminated_at: Optional[int] = None

    for lineno, line in enumerate(lines, start=1):
        if lineno == 1:
            line = line.lstrip("\ufeff")
        text = line.rstrip()
        if not text:
            continue
        if not header_seen:
            if not text.startswith("FN"):
                raise MalformedHeader("export must start with an FN header line", line=lineno, source=source)
            header_seen = True
            continue
        if line.startswith(CONTINUATION):
            if block is None or last_tag is None:
                raise MalformedRecord("continuation line outside a field", line=lineno, source=source)
            block.add(last_tag, text.strip(), lineno)
            continue
        if len(text) < 2:
            raise MalformedRecord("tag line shorter than 2 characters", line=lineno, source=source)
        tag = text[:2]
        if not _TAG_RE.match(tag) or (len(text) > 2 and text[2] != " "):
            raise MalformedRecord(f"invalid tag line {text[:10]!r}", line=lineno, source=source)
        value = text[3:].strip()
        if tag == "VR" and block is None and not records:
            continue
        if tag == "EF":
            if block is not None:
                raise MalformedRecord("EF reached inside a record without ER", line=lineno, source=source)
            terminated_at = lineno
            break
        if tag == "ER":
            if block is None:
                raise MalformedRecord("ER without any preceding tags", line=lineno, source=source)
            rec = block.to_record(source)
            if rec.record_id in seen:
                raise DuplicateRecordId(rec.record_id, line=block.lines.get("UT", block.line), source=source)
            seen[rec.record_id] = block.line
            records.append(rec)
            block = None
            last_tag = None
            continue
        if block is None:
            block = _Block(lineno)
        block.add(tag, value, lineno)
        last_tag = tag

    if terminated_at is None:
        raise MissingFileTerminator("missing EF file terminator", line=len(lines) + 1, source=source)
    trailing = [l for l in lines[terminated_at:] if l.strip()]
    if trailing:
        logger.warning("%s: %d non-blank line(s) after EF ignored", source, len(trailing))
    return records


def _emit(out: List[str], tag: str, values: List[str]) -> None:
    values = [v for v in values if v]
    if not values:
        return
    out.append(f"{tag} {values[0]}")
    out.extend(CONTINUATION + v for v in values[1:])


def _affiliation_line(a: Affiliation) -> str:
    return ", ".join(p for p in (a.institution, a.city, a.country) if p)


def format_wos_export(records: List[BibRecord]) -> bytes:
    """Write records back in the WOS tagged format (one field per known tag)."""
    out: List[str] = ["FN Clarivate Analytics Web of Science", "VR 1.0"]
    for r in records:
        extra = r.extra_tags()
        _emit(out, "PT", list(extra.pop("PT", ())))
        _emit(out, "AU", [f"{s}, {i}" if i else s for s, i in r.authors])
        _emit(out, "TI", [r.title])
        _emit(out, "SO", [r.source])
        _emit(out, "J9", [r.source_abbrev])
        _emit(out, "DT", [r.doc_type.value])
        _emit(out, "DE", ["; ".join(r.keywords)])
        _emit(out, "AB", [r.abstract or ""])
        _emit(out, "C1", [_affiliation_line(a) for a in r.affiliations])
        _emit(out, "CR", [ref.raw for ref in r.cited_refs])
        out.append(f"TC {r.times_cited}")
        _emit(out, "PY", [str(r.year) if r.year is not None else ""])
        _emit(out, "VL", [r.volume or ""])
        _emit(out, "BP", [r.start_page or ""])
        _emit(out, "DI", [r.doi or ""])
        for tag in sorted(extra):
            _emit(out, tag, list(extra[tag]))
        out.append(f"UT {r.record_id}")
        out.append("ER")
        out.append("")
    out.append("EF")
    return ("\n".join(out) + "\n").encode("utf-8")
