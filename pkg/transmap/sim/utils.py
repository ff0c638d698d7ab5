from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from ..corpus.affiliations import normalize_affiliation
from ..corpus.models import Affiliation, BibRecord, DocType
from ..corpus.references import parse_reference
from ..network.graph import CitationNetwork


def record_id(i: int) -> str:
    return f"WOS:{i:015d}"


def synthetic_counts(n: int, top_n: int, top_total: int, total: int) -> List[int]:
    """times_cited values (descending) whose top `top_n` hold exactly `top_total` of `total`.

    Counts are spread as evenly as possible inside each group; the smallest top
    count must stay above the largest remaining count.
    """
    if not 0 < top_n <= n or not 0 <= top_total <= total:
        raise ValueError("inconsistent corpus shape")
    q, r = divmod(top_total, top_n)
    top = [q + 1] * r + [q] * (top_n - r)
    rest_n = n - top_n
    rest: List[int] = []
    if rest_n:
        q2, r2 = divmod(total - top_total, rest_n)
        rest = [q2 + 1] * r2 + [q2] * (rest_n - r2)
        if rest and min(top) <= max(rest):
            raise ValueError("top group does not dominate the remainder")
    elif total != top_total:
        raise ValueError("no records left to carry the remaining citations")
    return top + rest


def corpus_from_counts(counts: Sequence[int], seed: int = 0) -> List[BibRecord]:
    """Bare records carrying the given citation counts, in shuffled order."""
    rng = random.Random(seed)
    order = list(range(len(counts)))
    rng.shuffle(order)
    return [
        BibRecord(
            record_id=record_id(i + 1),
            title=f"Synthetic record {i + 1}",
            doc_type=DocType.ARTICLE,
            year=1990 + (i % 24),
            times_cited=int(counts[i]),
        )
        for i in order
    ]


def liposomes_counts() -> List[int]:
    # 1456 records, 33,657 citations, 291 selected holding 22,949
    return synthetic_counts(1456, 291, 22949, 33657)


def metallic_counts() -> List[int]:
    # 677 records, 16,884 citations; the 137 records tied at the cut-off hold 12,878
    return synthetic_counts(677, 137, 12878, 16884)


# 30-record liposome-like sample ------------------------------------------------

SAMPLE_COUNTS = [140, 110, 90, 70, 55, 45, 40, 33, 30, 27, 24, 20, 18, 16, 15, 13, 12, 10, 9, 8, 7, 6, 5, 5, 4, 3, 3, 2, 1, 0]

# surname, initials, year, J9, source, volume, page, affiliation lines, title, abstract
_SELECTED = [
    (
        "Alvarez", "JM", 1990, "BBA-BIOMEMBRANES", "BIOCHIMICA ET BIOPHYSICA ACTA", "1029", "91",
        ["Univ Calif San Francisco, Dept Pharmaceut Chem, San Francisco, CA 94143 USA"],
        "Sterically stabilized liposomes with polyethylene glycol",
        "Liposomes containing cholesterol and phosphatidylcholine showed a longer circulation time in mice. "
        "Tissue distribution and pharmacokinetics were measured for each lipid bilayer composition.",
    ),
    (
        "Brenner", "K", 1992, "CANCER RES", "CANCER RESEARCH", "52", "4950",
        ["Univ British Columbia, Dept Biochem, Vancouver, BC V6T 1Z3, Canada"],
        "Doxorubicin encapsulated in liposomes: endocytosis and apoptosis in tumor cell lines",
        "Cellular uptake of liposomal doxorubicin by HeLa cells was followed by fluorescence microscopy. "
        "Apoptosis and cell cycle arrest depended on particle size.",
    ),
    (
        "Castillo", "R", 1994, "J CONTROL RELEASE", "JOURNAL OF CONTROLLED RELEASE", "30", "1",
        ["Hebrew Univ Jerusalem, Sch Pharm, Jerusalem, Israel"],
        "Lipid bilayer stability of liposomal drug carriers",
        "Drug stability and controlled release from phosphatidylcholine vesicles were studied by "
        "electron microscopy and zeta potential measurements.",
    ),
    (
        "Dunmore", "A", 1996, "J CLIN ONCOL", "JOURNAL OF CLINICAL ONCOLOGY", "14", "2345",
        ["Univ Texas MD Anderson Canc Ctr, Dept Gynecol Oncol, Houston, TX 77030 USA"],
        "Phase II trial of pegylated liposomal doxorubicin in ovarian cancer patients",
        "Patients received an intravenous infusion every four weeks. Treatment outcome, survival rate "
        "and hand-foot syndrome were recorded; the maximum tolerated dose was confirmed.",
    ),
    (
        "Eklund", "P", 1998, "J CLIN ONCOL", "JOURNAL OF CLINICAL ONCOLOGY", "16", "1112",
        [
            "Univ Texas MD Anderson Canc Ctr, Houston, TX USA",
            "Mem Sloan Kettering Canc Ctr, New York, NY 10021 USA",
        ],
        "Randomized trial of liposomal doxorubicin versus chemotherapy in Kaposi sarcoma",
        "In this randomized controlled trial, outpatients were assigned to drug therapy arms. "
        "Prognosis, quality of life and neutropenia were compared.",
    ),
    (
        "Fairbanks", "L", 2000, "ANN ONCOL", "ANNALS OF ONCOLOGY", "11", "501",
        ["Natl Taiwan Univ, Dept Oncol, Taipei 10764, Taiwan"],
        "Cardiotoxicity and quality of life after liposomal doxorubicin in elderly breast cancer patients",
        "A prospective study of elderly patients measured cardiotoxicity by magnetic resonance imaging "
        "and tracked apoptosis markers.",
    ),
]

# (citing, cited) among the selected records: two triangles joined by one bridge
SAMPLE_EDGES = [(1, 0), (2, 0), (2, 1), (3, 0), (4, 3), (5, 3), (5, 4)]

_OTHER_TOPICS = [
    ("Gene therapy with cationic liposomes", "Gene transfer of plasmid DNA into tumor cells by transfection; gene expression was quantified."),
    ("Hyperthermia triggered release from thermosensitive liposomes", "Induced hyperthermia increased drug release; body temperature was monitored in rats."),
    ("Photodynamic therapy using liposomal photosensitizers", "Photosensitizers delivered by liposomes were activated by laser light in nude mice."),
    ("Small interfering RNA delivery with lipid nanoparticles", "siRNA mediated gene silencing reduced tumor growth in xenograft models."),
    ("Liposomal paclitaxel in non-small cell lung cancer", "A phase I study of liposomal paclitaxel defined the maximum tolerated dose in patients."),
    ("Immunoliposomes targeting HER2", "Trastuzumab fragments conjugated to liposomes increased cellular uptake in breast cancer cells."),
]
_OTHER_AFFILIATIONS = [
    "Chinese Acad Sci, Inst Mat Med, Shanghai 201203, Peoples R China",
    "Seoul Natl Univ, Coll Pharm, Seoul 151742, South Korea",
    "Univ Tokyo, Grad Sch Med, Tokyo 1130033, Japan",
    "Johns Hopkins Univ, Sch Med, Baltimore, MD 21205 USA",
    "Univ Texas MD Anderson Canc Ctr, Dept Expt Therapeut, Houston, TX 77030 USA",
    "Harvard Univ, Sch Med, Boston, MA 02115 USA",
]
_OTHER_SURNAMES = [
    "Garner", "Holloway", "Ibarra", "Jansen", "Kowalski", "Lindqvist", "Moreau", "Nakamura",
    "Okafor", "Petrov", "Quintero", "Rasmussen", "Sato", "Tanaka", "Underwood", "Varga",
    "Whitfield", "Xu", "Yilmaz", "Zelenko", "Abbott", "Becker", "Chen", "Diaz",
]


def _ref(surname: str, initials: str, year: int, j9: str, volume: str, page: str) -> str:
    return f"{surname.upper()} {initials}, {year}, {j9}, V{volume}, P{page}"


def liposome_like_corpus() -> List[BibRecord]:
    """Deterministic 30-record sample: 6 top-cited records citing each other, 24 others.

    Top 20% hold 510 of 821 citations (62.1%).
    """
    records: List[BibRecord] = []
    cites: Dict[int, List[int]] = {}
    for src, dst in SAMPLE_EDGES:
        cites.setdefault(src, []).append(dst)
    for i, (sur, ini, year, j9, so, vol, page, c1, title, abstract) in enumerate(_SELECTED):
        refs = [_ref(*_SELECTED[j][:4], _SELECTED[j][5], _SELECTED[j][6]) for j in sorted(cites.get(i, []))]
        refs.append("BANGHAM AD, 1965, J MOL BIOL, V13, P238")
        records.append(
            BibRecord(
                record_id=record_id(i + 1),
                title=title,
                abstract=abstract,
                authors=((sur, ini), ("Okafor", "C")),
                source=so,
                doc_type=DocType.ARTICLE,
                year=year,
                cited_refs=tuple(parse_reference(r) for r in refs),
                times_cited=SAMPLE_COUNTS[i],
                affiliations=tuple(_affiliations(c1)),
                keywords=("liposomes", "doxorubicin"),
                source_abbrev=j9,
                volume=vol,
                start_page=page,
                doi=f"10.5555/sample.{i + 1}",
            )
        )
    for k in range(len(SAMPLE_COUNTS) - len(_SELECTED)):
        i = k + len(_SELECTED)
        title, abstract = _OTHER_TOPICS[k % len(_OTHER_TOPICS)]
        cited = _SELECTED[k % len(_SELECTED)]
        refs = [_ref(*cited[:4], cited[5], cited[6]), f"UNKNOWN Z, {1980 + k}, J OBSCURE, V{k + 1}, P{10 * k + 1}"]
        records.append(
            BibRecord(
                record_id=record_id(i + 1),
                title=title,
                abstract=abstract,
                authors=((_OTHER_SURNAMES[k], "A"),),
                source="INTERNATIONAL JOURNAL OF PHARMACEUTICS",
                doc_type=DocType.ARTICLE,
                year=2001 + (k % 12),
                cited_refs=tuple(parse_reference(r) for r in refs),
                times_cited=SAMPLE_COUNTS[i],
                affiliations=tuple(_affiliations([_OTHER_AFFILIATIONS[k % len(_OTHER_AFFILIATIONS)]])),
                source_abbrev="INT J PHARM",
                volume=str(100 + k),
                start_page=str(1 + 7 * k),
            )
        )
    return records


def _affiliations(lines: Sequence[str]) -> List[Affiliation]:
    out: List[Affiliation] = []
    for line in lines:
        out.extend(normalize_affiliation(line))
    return out


# Reference-matching fixture ----------------------------------------------------

_MATCH_JOURNALS = [
    ("J CLIN ONCOL", "JOURNAL OF CLINICAL ONCOLOGY"),
    ("CANCER RES", "CANCER RESEARCH"),
    ("CLIN CANCER RES", "CLINICAL CANCER RESEARCH"),
    ("J CONTROL RELEASE", "JOURNAL OF CONTROLLED RELEASE"),
    ("ADV DRUG DELIVER REV", "ADVANCED DRUG DELIVERY REVIEWS"),
    ("BBA-BIOMEMBRANES", "BIOCHIMICA ET BIOPHYSICA ACTA"),
    ("P NATL ACAD SCI USA", "PROCEEDINGS OF THE NATIONAL ACADEMY OF SCIENCES"),
    ("INT J CANCER", "INTERNATIONAL JOURNAL OF CANCER"),
    ("BRIT J CANCER", "BRITISH JOURNAL OF CANCER"),
    ("NEW ENGL J MED", "NEW ENGLAND JOURNAL OF MEDICINE"),
]
_MATCH_SURNAMES = [
    "Ranson", "Gabizon", "Allen", "Barenholz", "Lasic", "Torchilin", "Woodle", "Huang",
    "Szoka", "Northfelt", "Muggia", "Harrington", "Safra", "Batist", "Drummond", "Kirpotin",
    "Park", "Maeda",
]


def reference_matching_fixture() -> Tuple[List[BibRecord], Set[Tuple[str, str]], int]:
    """20 records, 60 cited-reference strings: 38 true edges, 5 ambiguous, 17 external.

    Record 0 is the Ranson 1997 J CLIN ONCOL V15 P3185 paper. Records 18 and 19
    share first author, year and journal so that a reference without volume is
    ambiguous. Returns (records, expected edges, expected ambiguities).
    """
    meta = []
    for i in range(18):
        j9, _ = _MATCH_JOURNALS[i % len(_MATCH_JOURNALS)]
        meta.append((_MATCH_SURNAMES[i], "M" if i == 0 else "A", 1990 + i, j9, str(10 + i), str(100 + 11 * i)))
    meta[0] = ("Ranson", "M", 1997, "J CLIN ONCOL", "15", "3185")
    meta.append(("Smith", "J", 2001, "CANCER RES", "61", "100"))
    meta.append(("Smith", "J", 2001, "CANCER RES", "62", "200"))
    dois = {i: f"10.5555/match.{i}" for i in range(20)}
    dois[0] = "10.1200/jco.1997.15.10.3185"
    full = dict(_MATCH_JOURNALS)

    pairs = [(i, i - 1) for i in range(1, 20)] + [(i, i - 2) for i in range(2, 20)] + [(19, 0)]
    refs: Dict[int, List[str]] = {i: [] for i in range(20)}
    for n, (src, dst) in enumerate(pairs):
        sur, ini, year, j9, vol, page = meta[dst]
        form = n % 5 if dst < 18 else 0
        if (src, dst) == (1, 0):
            raw = "RANSON MR, 1997, J CLIN ONCOL, V15, P3185"
        elif (src, dst) == (2, 0):
            raw = "Ranson M, 1997, JOURNAL OF CLINICAL ONCOLOGY, V15, P3185"
        elif (src, dst) == (19, 0):
            raw = "RANSON M, 1997, J CLIN ONCOL, V15, P3185, DOI 10.1200/JCO.1997.15.10.3185"
        elif form == 0:
            raw = f"{sur.upper()} {ini}, {year}, {j9}, V{vol}, P{page}"
        elif form == 1:
            raw = f"{sur} {ini}, {year}, {full.get(j9, j9)}, V{vol}"
        elif form == 2:
            raw = f"{sur.upper()} {ini}, {year}, {j9}, V{vol}, P{page}, DOI {dois[dst].upper()}"
        elif form == 3:
            raw = f"{sur.upper()} {ini}, {year}, MISSPELLED JOURNAL, DOI {dois[dst]}"
        else:
            raw = f"{sur.upper()} {ini}, {year}, {j9}"
        refs[src].append(raw)
    for src in range(5):
        refs[src].append("SMITH J, 2001, CANCER RES")
    externals = [f"DOE {chr(65 + k)}, {1970 + k}, LANCET, V{k + 1}, P{k + 5}" for k in range(12)]
    externals += [
        "RANSON M, 1997, J CLIN ONCOL, V16, P3185",
        "SMITH J, 2001, CANCER RES, V63",
        "[Anonymous], 2005, FDA LABEL",
        "ANONYMOUS, NATURE",
        "GABIZON A, 1991, CANCER RES, V99, P1",
    ]
    for k, raw in enumerate(externals):
        refs[(k * 7) % 20].append(raw)

    records = []
    for i, (sur, ini, year, j9, vol, page) in enumerate(meta):
        records.append(
            BibRecord(
                record_id=record_id(100 + i),
                title=f"Matching fixture paper {i}",
                authors=((sur, ini),),
                source=full.get(j9, j9),
                doc_type=DocType.ARTICLE,
                year=year,
                cited_refs=tuple(parse_reference(r) for r in refs[i]),
                times_cited=100 - i,
                source_abbrev=j9,
                volume=vol,
                start_page=page,
                doi=dois[i],
            )
        )
    edges = {(record_id(100 + s), record_id(100 + d)) for s, d in pairs}
    return records, edges, 5


# Graph fixtures -----------------------------------------------------------------

def node_name(i: int, width: int = 3) -> str:
    return f"n{i:0{width}d}"


def network_from_graph(g: nx.Graph, years: Optional[Dict[int, int]] = None) -> CitationNetwork:
    """Orient every undirected edge from the larger to the smaller integer node."""
    nodes = [node_name(n) for n in sorted(g.nodes)]
    edges = [(node_name(max(u, v)), node_name(min(u, v))) for u, v in g.edges if u != v]
    attrs = {node_name(n): {"year": (years or {}).get(n, 2000 + n % 10), "label": node_name(n)} for n in g.nodes}
    return CitationNetwork.create(nodes, edges, attrs)


def disjoint_cliques(sizes: Sequence[int]) -> CitationNetwork:
    g = nx.Graph()
    start = 0
    for s in sizes:
        g.add_nodes_from(range(start, start + s))
        g.add_edges_from((start + a, start + b) for a in range(s) for b in range(a + 1, s))
        start += s
    return network_from_graph(g)


def random_small_network(n: int, p: float, seed: int) -> CitationNetwork:
    return network_from_graph(nx.gnp_random_graph(n, p, seed=seed))


def planted_partition(blocks: int = 3, size: int = 8, p_in: float = 0.9, p_out: float = 0.05, seed: int = 0) -> Tuple[CitationNetwork, List[Set[str]]]:
    g = nx.planted_partition_graph(blocks, size, p_in, p_out, seed=seed)
    truth = [{node_name(b * size + i) for i in range(size)} for b in range(blocks)]
    return network_from_graph(g), truth


def random_annotation_counts(n: int, seed: int = 0, max_terms: int = 12) -> np.ndarray:
    """(n, 2) array of clinical/nonclinical term counts, some rows all zero."""
    rng = np.random.default_rng(seed)
    out = rng.integers(0, max_terms, size=(n, 2))
    out[rng.random(n) < 0.1] = 0
    return out


# Leaderboard fixture ---------------------------------------------------------------

def leaderboard_corpus() -> List[BibRecord]:
    """40 papers: MD Anderson on 15 (several spellings), two institutions tied at 7.

    Countries rank USA (16), China (9), South Korea (7), Canada (4).
    """
    spellings = [
        "Univ Texas MD Anderson Canc Ctr, Houston, TX 77030 USA",
        "UNIV TEXAS MD ANDERSON CANC CTR, Houston, TX USA",
        "Univ Texas M D Anderson Canc Ctr, Houston, TX 77030 USA",
    ]
    records = []
    for i in range(40):
        lines = []
        if i < 15:
            lines.append(spellings[i % len(spellings)])
            if i % 2 == 0:
                # same institution twice on one paper still counts once
                lines.append(spellings[0])
        if 10 <= i < 17:
            lines.append("Chinese Acad Sci, Inst Chem, Beijing 100190, Peoples R China")
        if 17 <= i < 24:
            lines.append("Seoul Natl Univ, Dept Chem, Seoul 151742, " + ("South Korea" if i % 2 == 0 else "Korea"))
        if 24 <= i < 27:
            lines.append("Univ Toronto, Dept Chem, Toronto, ON M5S 3H6, Canada")
        if 27 <= i < 29:
            lines.append("Tsinghua Univ, Dept Chem, Beijing 100084, Peoples R China")
        if i == 29:
            lines += ["Duke Univ, Durham, NC 27710 USA", "Univ Toronto, Toronto, ON, Canada"]
        records.append(
            BibRecord(
                record_id=record_id(500 + i),
                title=f"Leaderboard fixture paper {i}",
                year=2005 + i % 8,
                doc_type=DocType.ARTICLE,
                times_cited=40 - i,
                affiliations=tuple(_affiliations(lines)),
            )
        )
    return records
