from __future__ import annotations

import os
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import yaml

from ..errors import InvalidQuery, MissingInputFile
from ..text import tokenize
from .models import BibRecord, DocType, Query

PatternTokens = Tuple[str, ...]


def compile_pattern(pattern: str) -> PatternTokens:
    """`"gold nanoparticle*"` -> ("gold", "nanoparticle*")."""
    return tuple(w.lower() for w in pattern.strip().strip('"').split())


def _token_matches(token: str, pat: str) -> bool:
    if pat.endswith("*"):
        return token.startswith(pat[:-1])
    return token == pat


def matches_tokens(tokens: Sequence[str], pattern: PatternTokens) -> bool:
    """True when the pattern words match consecutive tokens somewhere in `tokens`."""
    k = len(pattern)
    if k == 0 or len(tokens) < k:
        return False
    for start in range(len(tokens) - k + 1):
        if all(_token_matches(tokens[start + j], pattern[j]) for j in range(k)):
            return True
    return False


def _any_match(fields: Iterable[List[str]], patterns: List[PatternTokens]) -> bool:
    fields = list(fields)
    return any(matches_tokens(tokens, p) for p in patterns for tokens in fields)


def record_matches(record: BibRecord, q: Query) -> bool:
    if q.doc_type is not None and record.doc_type is not q.doc_type:
        return False
    if q.year_range is not None:
        lo, hi = q.year_range
        if record.year is None or not (lo <= record.year <= hi):
            return False
    title_tokens = tokenize(record.title)
    if q.title_patterns:
        if not _any_match([title_tokens], [compile_pattern(p) for p in q.title_patterns]):
            return False
    if q.topic_patterns:
        fields = [title_tokens, tokenize(record.abstract)] + [tokenize(k) for k in record.keywords]
        if not _any_match(fields, [compile_pattern(p) for p in q.topic_patterns]):
            return False
    return True


def apply_query_filter(records: List[BibRecord], q: Query) -> List[BibRecord]:
    """Keep records satisfying the title AND topic AND doc_type/year constraints, in order.

    Patterns within a list are OR-ed; `*` is a suffix wildcard; a multiword
    pattern must match consecutive tokens of a single field.
    """
    return [r for r in records if record_matches(r, q)]


def query_from_mapping(data: Mapping[str, Any]) -> Query:
    def _patterns(*keys: str) -> Tuple[str, ...]:
        for key in keys:
            value = data.get(key)
            if value is None:
                continue
            if isinstance(value, str):
                return (value,)
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise InvalidQuery(f"{key}: expected a list of patterns")
            return tuple(value)
        return ()

    doc_type = None
    if data.get("doc_type"):
        try:
            doc_type = DocType(str(data["doc_type"]).capitalize())
        except ValueError as exc:
            raise InvalidQuery(f"unknown doc_type {data['doc_type']!r}") from exc
    year_range = None
    if data.get("year_range") is not None:
        yr = data["year_range"]
        if not isinstance(yr, (list, tuple)) or len(yr) != 2:
            raise InvalidQuery("year_range must be [min, max]")
        try:
            year_range = (int(yr[0]), int(yr[1]))
        except (TypeError, ValueError) as exc:
            raise InvalidQuery(f"year_range must hold integers: {yr!r}") from exc
    return Query(
        title_patterns=_patterns("title", "title_patterns"),
        topic_patterns=_patterns("topic", "topic_patterns"),
        doc_type=doc_type,
        year_range=year_range,
    )


def query_to_mapping(q: Query) -> Dict[str, Any]:
    return {
        "title": list(q.title_patterns),
        "topic": list(q.topic_patterns),
        "doc_type": q.doc_type.value if q.doc_type else None,
        "year_range": list(q.year_range) if q.year_range else None,
    }


def load_query(spec: Union[str, Mapping[str, Any]]) -> Query:
    """Load a query from a YAML file path or an already-parsed mapping."""
    if isinstance(spec, Mapping):
        return query_from_mapping(spec)
    if not os.path.exists(spec):
        raise MissingInputFile(spec)
    with open(spec, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise InvalidQuery(f"{spec}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidQuery(f"{spec}: expected a mapping")
    return query_from_mapping(data)
