from __future__ import annotations

import io
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from transmap.corpus.models import BibRecord
from transmap.errors import MalformedRow, MissingInputFile, OutOfRange
from transmap.semantic.annotate import (
    Annotation,
    annotate_corpus,
    annotate_document,
    annotations_from_json,
    annotations_to_json,
    clinical_ratio,
    match_terms,
)
from transmap.semantic.vocabulary import (
    TermClass,
    VocabSource,
    VocabTerm,
    classify_term,
    load_clinical_prefixes,
    load_vocabulary,
)
from transmap.sim.utils import liposome_like_corpus, random_annotation_counts
from transmap.text import tokenize

VOCAB = load_vocabulary()
HEADER = "term_id\tsource\tpreferred_label\ttree_numbers\tsynonyms\n"


def _doc(title, abstract=None):
    return BibRecord(record_id="WOS:1", title=title, abstract=abstract)


def test_bundled_prefixes():
    assert load_clinical_prefixes() == {
        "E01": "Diagnosis",
        "E02": "Therapeutics",
        "E04": "Surgical Procedures, Operative",
        "M01": "Named Groups",
        "N": "Health Care",
    }


def test_liposomal_doxorubicin_title():
    a = annotate_document(_doc("Liposomal doxorubicin in breast cancer patients"), VOCAB)
    assert a.matched == {"D008081", "D004317", "D001943", "D010361"}
    assert (a.clinical_count, a.nonclinical_count) == (1, 3)
    assert clinical_ratio(a) == 0.25


def test_longest_match_wins():
    hits = match_terms(tokenize("breast cancer and lung cancer"), VOCAB)
    assert hits == ["D001943", "D008175"]
    assert "D009369" not in hits


def test_terms_are_counted_once_per_document():
    a = annotate_document(_doc("Liposomes and liposomal chemotherapy", "A liposome study."), VOCAB)
    assert a.matched == {"D008081", "D004358"}
    assert dict(a.term_counts)["D008081"] == 3
    assert clinical_ratio(a, "unique") == 0.5
    assert clinical_ratio(a, "occurrences") == 0.25


def test_matches_do_not_span_title_and_abstract():
    a = annotate_document(_doc("Outcomes in breast", "cancer was treated"), VOCAB)
    assert "D001943" not in a.matched
    assert "D009369" in a.matched


def test_mesh_beats_go_on_shared_surface():
    assert VOCAB.surface_index["endocytosis"] == ("D004705", "GO:0006897")
    a = annotate_document(_doc("Endocytosis of liposomes"), VOCAB)
    assert "D004705" in a.matched and "GO:0006897" not in a.matched
    assert VOCAB.terms["GO:0006897"].source is VocabSource.GO


def test_classification():
    assert VOCAB.classify("D004358") is TermClass.CLINICAL  # E02
    assert VOCAB.classify("D010361") is TermClass.CLINICAL  # M01
    assert VOCAB.classify("D002986") is TermClass.CLINICAL  # N05
    assert VOCAB.classify("D004317") is TermClass.NONCLINICAL
    assert VOCAB.classify("GO:0006897") is TermClass.NONCLINICAL
    term = VocabTerm("X1", "Thing", (), VocabSource.MESH, ("A01.1", "E04.5"))
    assert classify_term(term, ["E04"]) is TermClass.CLINICAL
    assert classify_term(term, ["E01"]) is TermClass.NONCLINICAL


def test_empty_document_has_no_ratio():
    a = annotate_document(_doc("Zzyzx qwerty"), VOCAB)
    assert a.is_empty
    assert clinical_ratio(a) is None
    assert clinical_ratio(a, "occurrences") is None


def test_unknown_count_mode():
    with pytest.raises(OutOfRange):
        clinical_ratio(Annotation("x"), "bogus")


@pytest.mark.parametrize(
    "row,line",
    [
        ("GO:1\tGO\tsomething\tG01.1\t\n", 2),
        ("D1\tMESH\tsomething\t\tsyn\n", 2),
        ("D1\tUMLS\tsomething\tA01\t\n", 2),
        ("D1\tMESH\n", 2),
        ("D1\tMESH\tone\tA01\t\nD1\tMESH\ttwo\tA02\t\n", 3),
    ],
)
def test_malformed_vocabulary_rows(row, line):
    with pytest.raises(MalformedRow) as e:
        load_vocabulary(io.StringIO(HEADER + row), {"E01": "Diagnosis"})
    assert e.value.line == line


def test_custom_vocabulary_and_prefixes(tmp_path):
    vocab_path = tmp_path / "vocab.tsv"
    vocab_path.write_text(
        "# custom\n" + HEADER + "T1\tMESH\tGold Nanoparticles\tD25.1\tgold nanoparticle;AuNP\nT2\tMESH\tSurgery\tE04.1\t\n",
        encoding="utf-8",
    )
    prefixes = load_clinical_prefixes(io.StringIO("E04\tSurgical Procedures, Operative\n"))
    vocab = load_vocabulary(str(vocab_path), prefixes)
    assert len(vocab) == 2
    assert vocab.lookup("aunp") == "T1"
    a = annotate_document(_doc("Gold nanoparticles before surgery", "AuNP imaging"), vocab)
    assert dict(a.term_counts) == {"T1": 2, "T2": 1}
    assert clinical_ratio(a) == 0.5
    with pytest.raises(MissingInputFile):
        load_vocabulary(str(tmp_path / "missing.tsv"))
    with pytest.raises(MalformedRow):
        load_clinical_prefixes(io.StringIO("E04\n"))


def test_clinical_ratio_oracle():
    counts = random_annotation_counts(100, seed=5)
    for i, (c, n) in enumerate(counts.tolist()):
        matched = frozenset([f"C{j}" for j in range(c)] + [f"N{j}" for j in range(n)])
        a = Annotation(f"r{i}", matched, clinical_count=c, nonclinical_count=n)
        expected = None if c + n == 0 else float(Fraction(c, c + n))
        assert clinical_ratio(a) == expected


@given(st.integers(0, 50), st.integers(0, 50))
def test_ratio_is_bounded(c, n):
    matched = frozenset([f"C{j}" for j in range(c)] + [f"N{j}" for j in range(n)])
    r = clinical_ratio(Annotation("x", matched, clinical_count=c, nonclinical_count=n))
    assert r is None if c + n == 0 else 0.0 <= r <= 1.0


@given(st.integers(0, 40), st.integers(0, 40))
def test_clinical_terms_never_lower_the_ratio(c, n):
    def ratio(cc, nn):
        matched = frozenset([f"C{j}" for j in range(cc)] + [f"N{j}" for j in range(nn)])
        return clinical_ratio(Annotation("x", matched, clinical_count=cc, nonclinical_count=nn))

    base = ratio(c, n)
    assert ratio(c + 1, n) >= (base or 0.0)
    if base is not None:
        assert ratio(c, n + 1) <= base


def test_adding_a_term_to_a_document_moves_the_ratio_one_way():
    for rec in liposome_like_corpus():
        base = clinical_ratio(annotate_document(rec, VOCAB))
        if base is None:
            continue
        more_clinical = annotate_document(replace(rec, abstract=(rec.abstract or "") + " Outpatients."), VOCAB)
        more_basic = annotate_document(replace(rec, abstract=(rec.abstract or "") + " Apoptosis."), VOCAB)
        assert clinical_ratio(more_clinical) >= base
        assert clinical_ratio(more_basic) <= base


def test_annotation_counts_must_add_up():
    with pytest.raises(ValueError):
        Annotation("x", frozenset({"a"}), clinical_count=1, nonclinical_count=1)


def test_corpus_annotation_threads_and_json():
    corpus = liposome_like_corpus()
    serial = annotate_corpus(corpus, VOCAB)
    threaded = annotate_corpus(corpus, VOCAB, workers=4)
    assert serial == threaded
    assert len(serial) == 30
    assert annotations_from_json(annotations_to_json(serial)) == serial
