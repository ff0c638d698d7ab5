from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from ..corpus.models import BibRecord
from ..synonyms import load_synonym_table
from ..text import fold_name


@dataclass(frozen=True)
class LeaderRow:
    name: str
    location: str
    paper_count: int


@dataclass(frozen=True)
class Leaderboard:
    rows: Tuple[LeaderRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(r.name, r.location, r.paper_count) for r in self.rows],
            columns=["name", "location", "paper_count"],
        )


def load_institution_synonyms(path: Optional[str] = None) -> dict:
    return load_synonym_table(path, "institution_synonyms.yaml", fold_name)


def load_country_synonyms(path: Optional[str] = None) -> dict:
    return load_synonym_table(path, "country_synonyms.yaml", fold_name)


def _modal(values: pd.Series) -> str:
    """Most frequent value, ties to the alphabetically first."""
    counts = values.value_counts()
    best = counts[counts == counts.max()].index
    return str(sorted(best)[0])


def _rank(df: pd.DataFrame) -> pd.DataFrame:
    return df.sort_values(["paper_count", "name"], ascending=[False, True], kind="mergesort").reset_index(drop=True)


def _affiliation_frame(records: Sequence[BibRecord], countries: Mapping[str, str]) -> pd.DataFrame:
    rows = []
    for rec in records:
        for a in rec.affiliations:
            country = countries.get(fold_name(a.country), a.country.strip()) if a.country else ""
            rows.append((rec.record_id, a.institution.strip(), a.city.strip(), country))
    return pd.DataFrame(rows, columns=["record_id", "institution", "city", "country"])


def institution_leaderboard(
    records: Sequence[BibRecord],
    synonyms: Optional[Mapping[str, str]] = None,
    countries: Optional[Mapping[str, str]] = None,
    top: Optional[int] = None,
) -> Leaderboard:
    """Distinct papers per normalized institution, count desc then name asc.

    Names are folded (case, punctuation) and mapped through `synonyms`; unmapped
    institutions are shown under their most frequent raw spelling.
    """
    synonyms = synonyms or {}
    df = _affiliation_frame(records, countries or {})
    df = df[df["institution"] != ""]
    if df.empty:
        return Leaderboard(())
    df = df.assign(key=df["institution"].map(fold_name))
    spelling = df.groupby("key")["institution"].agg(_modal)
    df = df.assign(
        name=[synonyms.get(k) or spelling[k] for k in df["key"]],
        place=[", ".join(p for p in (c, n) if p) for c, n in zip(df["city"], df["country"])],
    )
    table = (
        df.groupby("name", sort=True)
        .agg(location=("place", _modal), paper_count=("record_id", "nunique"))
        .reset_index()
    )
    table = _rank(table)
    if top is not None:
        table = table.head(top)
    return Leaderboard(tuple(LeaderRow(str(n), str(l), int(c)) for n, l, c in table.itertuples(index=False)))


def country_distribution(records: Sequence[BibRecord], countries: Optional[Mapping[str, str]] = None) -> List[Tuple[str, int]]:
    """Papers per country with full counting; a paper credits each of its countries once."""
    df = _affiliation_frame(records, countries or {})
    df = df[df["country"] != ""]
    if df.empty:
        return []
    counts = df.groupby("country")["record_id"].nunique().rename("paper_count").reset_index()
    counts = _rank(counts.rename(columns={"country": "name"}))
    return [(str(n), int(c)) for n, c in zip(counts["name"], counts["paper_count"])]
