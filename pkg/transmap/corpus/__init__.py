from .models import Affiliation, BibRecord, DocType, ParsedRef, Query, RefString
from .wos import parse_wos_export, format_wos_export
from .jsonio import parse_corpus_json, serialize_corpus
from .query import apply_query_filter, load_query
from .affiliations import normalize_affiliation
from .ingest import ingest_files

__all__ = [
    "Affiliation",
    "BibRecord",
    "DocType",
    "ParsedRef",
    "Query",
    "RefString",
    "parse_wos_export",
    "format_wos_export",
    "parse_corpus_json",
    "serialize_corpus",
    "apply_query_filter",
    "load_query",
    "normalize_affiliation",
    "ingest_files",
]
