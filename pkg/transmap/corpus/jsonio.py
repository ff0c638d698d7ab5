from __future__ import annotations

import json
from typing import IO, Any, Dict, List, Union

from ..errors import DuplicateRecordId, ParseError, SchemaViolation
from .models import Affiliation, BibRecord, DocType, ParsedRef, RefString
from .references import parse_reference

Source = Union[bytes, bytearray, str, IO[bytes]]


def _ref_to_dict(ref: RefString) -> Dict[str, Any]:
    parsed = None
    if ref.parsed is not None:
        p = ref.parsed
        parsed = {
            "first_author": p.first_author,
            "year": p.year,
            "source_abbrev": p.source_abbrev,
            "volume": p.volume,
            "start_page": p.start_page,
            "doi": p.doi,
        }
    return {"raw": ref.raw, "parsed": parsed}


def record_to_dict(r: BibRecord) -> Dict[str, Any]:
    return {
        "record_id": r.record_id,
        "title": r.title,
        "abstract": r.abstract,
        "authors": [[s, i] for s, i in r.authors],
        "source": r.source,
        "source_abbrev": r.source_abbrev,
        "doc_type": r.doc_type.value,
        "year": r.year,
        "volume": r.volume,
        "start_page": r.start_page,
        "doi": r.doi,
        "times_cited": r.times_cited,
        "keywords": list(r.keywords),
        "cited_refs": [_ref_to_dict(ref) for ref in r.cited_refs],
        "affiliations": [
            {"institution": a.institution, "city": a.city, "country": a.country} for a in r.affiliations
        ],
        "extra": {tag: list(values) for tag, values in r.extra},
    }


def serialize_corpus(records: List[BibRecord]) -> bytes:
    """Stable JSON rendering (sorted keys, two-space indent, trailing newline)."""
    payload = [record_to_dict(r) for r in records]
    return (json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _require(obj: Dict[str, Any], key: str, kind, index: int, source: str, optional: bool = False):
    value = obj.get(key)
    if value is None:
        if optional:
            return None
        raise SchemaViolation(key, "required field missing", index=index, source=source)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaViolation(key, f"expected {getattr(kind, '__name__', kind)}", index=index, source=source)
    return value


def _ref_from_json(value: Any, index: int, source: str) -> RefString:
    if isinstance(value, str):
        return parse_reference(value)
    if not isinstance(value, dict) or not isinstance(value.get("raw"), str) or not value["raw"].strip():
        raise SchemaViolation("cited_refs", "each reference needs a non-empty 'raw' string", index=index, source=source)
    parsed = value.get("parsed")
    if parsed is None:
        return RefString(raw=value["raw"])
    try:
        return RefString(
            raw=value["raw"],
            parsed=ParsedRef(
                first_author=str(parsed["first_author"]),
                year=int(parsed["year"]),
                source_abbrev=str(parsed["source_abbrev"]),
                volume=parsed.get("volume"),
                start_page=parsed.get("start_page"),
                doi=parsed.get("doi"),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation("cited_refs", f"bad parsed reference: {exc}", index=index, source=source) from exc


def record_from_dict(obj: Any, index: int = 0, source: str = "<stream>") -> BibRecord:
    if not isinstance(obj, dict):
        raise SchemaViolation("<record>", "expected a JSON object", index=index, source=source)
    record_id = _require(obj, "record_id", str, index, source)
    if not record_id:
        raise SchemaViolation("record_id", "must not be empty", index=index, source=source)
    title = _require(obj, "title", str, index, source)
    authors = []
    for a in _require(obj, "authors", list, index, source, optional=True) or []:
        if isinstance(a, str):
            a = [a, ""]
        if not isinstance(a, list) or len(a) != 2 or not all(isinstance(x, str) for x in a):
            raise SchemaViolation("authors", "expected [surname, initials] pairs", index=index, source=source)
        authors.append((a[0], a[1]))
    doc_type_raw = obj.get("doc_type") or DocType.OTHER.value
    try:
        doc_type = DocType(doc_type_raw)
    except ValueError as exc:
        raise SchemaViolation("doc_type", f"unknown document type {doc_type_raw!r}", index=index, source=source) from exc
    affiliations = []
    for a in _require(obj, "affiliations", list, index, source, optional=True) or []:
        if not isinstance(a, dict) or not isinstance(a.get("institution"), str) or not a["institution"]:
            raise SchemaViolation("affiliations", "each affiliation needs an institution", index=index, source=source)
        affiliations.append(Affiliation(a["institution"], a.get("city") or "", a.get("country") or ""))
    extra = _require(obj, "extra", dict, index, source, optional=True) or {}
    try:
        return BibRecord(
            record_id=record_id,
            title=title,
            abstract=_require(obj, "abstract", str, index, source, optional=True),
            authors=tuple(authors),
            source=_require(obj, "source", str, index, source, optional=True) or "",
            doc_type=doc_type,
            year=_require(obj, "year", int, index, source, optional=True),
            cited_refs=tuple(
                _ref_from_json(v, index, source)
                for v in _require(obj, "cited_refs", list, index, source, optional=True) or []
            ),
            times_cited=_require(obj, "times_cited", int, index, source, optional=True) or 0,
            affiliations=tuple(affiliations),
            keywords=tuple(_require(obj, "keywords", list, index, source, optional=True) or []),
            source_abbrev=_require(obj, "source_abbrev", str, index, source, optional=True) or "",
            volume=_require(obj, "volume", str, index, source, optional=True),
            start_page=_require(obj, "start_page", str, index, source, optional=True),
            doi=_require(obj, "doi", str, index, source, optional=True),
            extra=tuple(sorted((str(k), tuple(str(x) for x in v)) for k, v in extra.items())),
        )
    except SchemaViolation:
        raise
    except ValueError as exc:
        raise SchemaViolation("<record>", str(exc), index=index, source=source) from exc


def parse_corpus_json(data: Source, source: str = "<stream>") -> List[BibRecord]:
    """Parse the corpus JSON interchange format (an array of record objects)."""
    if hasattr(data, "read"):
        data = data.read()  # type: ignore[union-attr]
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, source=source) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"invalid UTF-8: {exc.reason}", line=None, source=source) from exc
    if not isinstance(payload, list):
        raise SchemaViolation("<root>", "expected a JSON array of records", source=source)
    records: List[BibRecord] = []
    seen = set()
    for i, obj in enumerate(payload):
        rec = record_from_dict(obj, index=i, source=source)
        if rec.record_id in seen:
            raise DuplicateRecordId(rec.record_id, source=source)
        seen.add(rec.record_id)
        records.append(rec)
    return records
