from .annotate import (
    Annotation,
    annotate_corpus,
    annotate_document,
    annotations_from_json,
    annotations_to_json,
    clinical_ratio,
)
from .vocabulary import (
    TermClass,
    VocabSource,
    VocabTerm,
    VocabularyIndex,
    classify_term,
    load_clinical_prefixes,
    load_vocabulary,
)

__all__ = [
    "Annotation",
    "TermClass",
    "VocabSource",
    "VocabTerm",
    "VocabularyIndex",
    "annotate_corpus",
    "annotate_document",
    "annotations_from_json",
    "annotations_to_json",
    "classify_term",
    "clinical_ratio",
    "load_clinical_prefixes",
    "load_vocabulary",
]
