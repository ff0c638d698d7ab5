from __future__ import annotations

import logging
import random

import pytest
from hypothesis import given, settings, strategies as st

from transmap.corpus.affiliations import normalize_affiliation
from transmap.corpus.jsonio import parse_corpus_json, serialize_corpus
from transmap.corpus.models import Affiliation, DocType
from transmap.corpus.wos import format_wos_export, parse_wos_export
from transmap.errors import (
    DuplicateRecordId,
    MalformedHeader,
    MalformedRecord,
    MissingFileTerminator,
    ParseError,
)
from transmap.sim.utils import liposome_like_corpus

FIXTURE_NAMES = ["basic.txt", "multiline.txt", "latin1.txt", "extra_tags.txt", "minimal.txt"]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_json_reemit_is_byte_identical(wos_fixture, name):
    records = parse_wos_export(wos_fixture(name), source=name)
    first = serialize_corpus(records)
    second = serialize_corpus(parse_corpus_json(first))
    assert first == second
    assert first.endswith(b"\n")


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_writer_round_trip(wos_fixture, name):
    records = parse_wos_export(wos_fixture(name), source=name)
    assert parse_wos_export(format_wos_export(records)) == records


def test_basic_fields(wos_fixture):
    ranson, gabizon = parse_wos_export(wos_fixture("basic.txt"))
    assert ranson.record_id == "WOS:A1997XY12300001"
    assert ranson.authors == (("Ranson", "MR"), ("Carmichael", "J"))
    assert ranson.title.startswith("Treatment of advanced breast cancer with sterically stabilized liposomal doxorubicin:")
    assert ranson.title.endswith("multicenter phase II trial")
    assert ranson.source == "JOURNAL OF CLINICAL ONCOLOGY"
    assert ranson.source_abbrev == "J CLIN ONCOL"
    assert ranson.doc_type is DocType.ARTICLE
    assert (ranson.year, ranson.times_cited, ranson.volume, ranson.start_page) == (1997, 212, "15", "3185")
    assert ranson.doi == "10.1200/jco.1997.15.10.3185"
    assert ranson.keywords == ("liposomes", "doxorubicin", "breast cancer")
    assert ranson.affiliations == (Affiliation("Christie Hosp NHS Trust", "Manchester", "England"),)
    assert ranson.extra_tags() == {"PT": ("J",)}
    assert len(ranson.cited_refs) == 2
    ref = ranson.cited_refs[0].parsed
    assert (ref.first_author, ref.year, ref.source_abbrev, ref.volume, ref.start_page) == (
        "GABIZON A", 1994, "CANCER RES", "54", "987"
    )
    assert gabizon.label == "Gabizon 1994"
    assert gabizon.abstract is None
    assert gabizon.has_address


def test_multiline_fields(wos_fixture):
    (rec,) = parse_wos_export(wos_fixture("multiline.txt"))
    assert len(rec.authors) == 3
    assert rec.source == "PROCEEDINGS OF THE NATIONAL ACADEMY OF SCIENCES OF THE UNITED STATES OF AMERICA"
    assert rec.doc_type is DocType.ARTICLE
    assert rec.keywords == ("micelles", "cancer targeting", "monoclonal antibody", "DRUG-DELIVERY", "TUMOR")
    assert rec.abstract.startswith("Polymeric micelles were modified")
    assert rec.affiliations == (
        Affiliation("Northeastern Univ", "Boston", "USA"),
        Affiliation("Univ Texas MD Anderson Canc Ctr", "Houston", "USA"),
    )
    assert len(rec.cited_refs) == 4
    assert rec.cited_refs[0].parsed.doi == "10.1126/science.1095833"
    assert rec.cited_refs[3].parsed is None
    assert rec.cited_refs[3].raw == "Anonymous, NATURE"


def test_latin1_fallback(wos_fixture, caplog):
    caplog.set_level(logging.INFO, logger="transmap")
    muller, garcia = parse_wos_export(wos_fixture("latin1.txt"), source="latin1.txt")
    assert muller.authors[0] == ("Müller", "K")
    assert muller.affiliations == (Affiliation("Univ Zürich", "Zürich", "Switzerland"),)
    assert garcia.authors[0] == ("García", "L")
    assert garcia.doc_type is DocType.REVIEW
    assert garcia.affiliations == (Affiliation("Univ Barcelona", "Barcelona", "Spain"),)
    assert "2 line(s) decoded as Latin-1" in caplog.text


def test_bom_extra_tags_and_trailing_text(wos_fixture, caplog):
    caplog.set_level(logging.WARNING, logger="transmap")
    (rec,) = parse_wos_export(wos_fixture("extra_tags.txt"))
    assert rec.record_id == "WOS:000079000000001"
    assert sorted(rec.extra_tags()) == ["NR", "PT", "SN", "WC", "Z9"]
    assert rec.extra_tags()["WC"] == ("Genetics & Heredity; Biotechnology & Applied Microbiology",)
    assert not rec.has_address
    assert "after EF ignored" in caplog.text


def test_minimal_record(wos_fixture):
    (rec,) = parse_wos_export(wos_fixture("minimal.txt"))
    assert rec.year is None
    assert rec.times_cited == 0
    assert rec.doc_type is DocType.OTHER
    assert rec.authors == ()
    assert rec.label == "WOS:000000000000042"


def test_str_input_is_accepted():
    text = "FN Clarivate\nVR 1.0\nTI A title\nUT WOS:1\nER\nEF\n"
    (rec,) = parse_wos_export(text)
    assert rec.title == "A title"


def test_missing_header():
    with pytest.raises(MalformedHeader) as e:
        parse_wos_export(b"VR 1.0\nEF\n", source="x.txt")
    assert e.value.line == 1
    assert str(e.value).startswith("x.txt:1:")


def test_missing_terminator_points_past_last_line():
    data = b"FN x\nVR 1.0\nTI a\nUT WOS:1\nER\n"
    with pytest.raises(MissingFileTerminator) as e:
        parse_wos_export(data)
    assert e.value.line == 6


def test_empty_input_is_positioned():
    with pytest.raises(MissingFileTerminator) as e:
        parse_wos_export(b"")
    assert e.value.line == 1


def test_duplicate_record_id():
    data = b"FN x\nTI a\nUT WOS:1\nER\nTI b\nUT WOS:1\nER\nEF\n"
    with pytest.raises(DuplicateRecordId) as e:
        parse_wos_export(data)
    assert e.value.record_id == "WOS:1"
    assert e.value.line == 6


def test_bad_year_is_positioned():
    data = b"FN x\nTI a\nPY 19x7\nUT WOS:1\nER\nEF\n"
    with pytest.raises(MalformedRecord) as e:
        parse_wos_export(data)
    assert e.value.line == 3


@pytest.mark.parametrize(
    "data,line",
    [
        (b"FN x\n   stray continuation\nEF\n", 2),
        (b"FN x\nTI a\nER\nEF\n", 2),
        (b"FN x\nER\nEF\n", 2),
        (b"FN x\nti lower case tag\nEF\n", 2),
        (b"FN x\nTI a\nUT WOS:1\nEF\n", 4),
        (b"FN x\nTI a\nTC many\nUT WOS:1\nER\nEF\n", 3),
    ],
)
def test_malformed_records(data, line):
    with pytest.raises(MalformedRecord) as e:
        parse_wos_export(data)
    assert e.value.line == line


def test_sample_corpus_survives_the_tagged_format():
    records = liposome_like_corpus()
    assert parse_wos_export(format_wos_export(records)) == records


def test_affiliation_examples():
    assert normalize_affiliation("Univ Texas MD Anderson Canc Ctr, Houston, TX 77030 USA") == [
        Affiliation("Univ Texas MD Anderson Canc Ctr", "Houston", "USA")
    ]
    assert normalize_affiliation("") == []
    two = normalize_affiliation("Univ Alberta, Edmonton, AB, Canada; Nagoya Univ, Nagoya, Japan")
    assert [(a.city, a.country) for a in two] == [("Edmonton", "Canada"), ("Nagoya", "Japan")]
    caps = normalize_affiliation("UNIV SAO PAULO, SAO PAULO, BRAZIL; SEOUL NATL UNIV, SEOUL, SOUTH KOREA")
    assert [(a.city, a.country) for a in caps] == [("SAO PAULO", "BRAZIL"), ("SEOUL", "SOUTH KOREA")]


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("Univ Texas MD Anderson Canc Ctr, Houston, TX USA", ("Univ Texas MD Anderson Canc Ctr", "Houston", "USA")),
        ("Univ Houston, Houston, TX, USA", ("Univ Houston", "Houston", "USA")),
        ("Duke Univ, Durham, NC 27710 USA.", ("Duke Univ", "Durham", "USA")),
        ("Univ Toronto, Dept Chem, Toronto, ON M5S 3H6, Canada", ("Univ Toronto", "Toronto", "Canada")),
        ("Chinese Acad Sci, Inst Chem, Beijing 100190, Peoples R China", ("Chinese Acad Sci", "Beijing", "Peoples R China")),
        ("[Smith, J; Doe, A] Univ Tokyo, Tokyo 1130033, Japan", ("Univ Tokyo", "Tokyo", "Japan")),
        ("NASA", ("NASA", "", "")),
        ("UNIV SAO PAULO, SAO PAULO, BRAZIL", ("UNIV SAO PAULO", "SAO PAULO", "BRAZIL")),
        ("UNIV SAO PAULO, SAO PAULO, SP, BRAZIL", ("UNIV SAO PAULO", "SAO PAULO", "BRAZIL")),
        ("UNIV BRITISH COLUMBIA, VANCOUVER, BC V6T 1Z3, CANADA", ("UNIV BRITISH COLUMBIA", "VANCOUVER", "CANADA")),
        ("MEM SLOAN KETTERING CANC CTR, NEW YORK, NY 10021 USA", ("MEM SLOAN KETTERING CANC CTR", "NEW YORK", "USA")),
        ("UNIV HOUSTON, HOUSTON, TX, USA", ("UNIV HOUSTON", "HOUSTON", "USA")),
        ("UNIV ULM, ULM, GERMANY", ("UNIV ULM", "ULM", "GERMANY")),
    ],
)
def test_affiliation_segments(raw, expected):
    (a,) = normalize_affiliation(raw)
    assert (a.institution, a.city, a.country) == expected


# Fuzzing: every mutated export parses or fails with a positioned ParseError.

def _mutate(rng: random.Random, data: bytes) -> bytes:
    lines = data.split(b"\n")
    op = rng.randrange(7)
    if op == 0 and lines:
        del lines[rng.randrange(len(lines))]
    elif op == 1 and lines:
        i = rng.randrange(len(lines))
        lines.insert(i, lines[i])
    elif op == 2 and len(lines) > 1:
        i, j = rng.randrange(len(lines)), rng.randrange(len(lines))
        lines[i], lines[j] = lines[j], lines[i]
    elif op == 3:
        lines.insert(rng.randrange(len(lines) + 1), rng.choice([b"ER", b"EF", b"   x", b"PY 3000", b"UT ", b"TC -1", b"\xff\xfe"]))
    elif op == 4 and data:
        buf = bytearray(data)
        for _ in range(rng.randint(1, 4)):
            buf[rng.randrange(len(buf))] = rng.randrange(256)
        return bytes(buf)
    elif op == 5:
        return data[: rng.randrange(len(data) + 1)]
    else:
        lines.insert(rng.randrange(len(lines) + 1), bytes(rng.randrange(256) for _ in range(rng.randint(0, 12))))
    return b"\n".join(lines)


def test_fuzzed_exports_never_crash(wos_fixture):
    seeds = [wos_fixture(n) for n in FIXTURE_NAMES]
    rng = random.Random(1234)
    outcomes = {"ok": 0, "error": 0}
    for _ in range(10_000):
        data = rng.choice(seeds)
        for _ in range(rng.randint(1, 3)):
            data = _mutate(rng, data)
        try:
            parse_wos_export(data)
            outcomes["ok"] += 1
        except ParseError as e:
            assert isinstance(e.line, int) and e.line >= 1
            outcomes["error"] += 1
    assert outcomes["ok"] > 0 and outcomes["error"] > 0


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=400))
def test_arbitrary_bytes_never_crash(data):
    try:
        parse_wos_export(b"FN x\n" + data)
    except ParseError as e:
        assert e.line is not None
