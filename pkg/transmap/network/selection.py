from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import pandas as pd

from ..corpus.models import BibRecord
from ..errors import EmptyCorpus, OutOfRange, ZeroTotalCitations

logger = logging.getLogger(__name__)


class TiePolicy(Enum):
    INCLUDE_TIES = "include"
    TRUNCATE_STRICT = "truncate"


@dataclass(frozen=True)
class SelectionConfig:
    fraction: float = 0.2
    min_coverage: float = 0.6
    tie_policy: TiePolicy = TiePolicy.INCLUDE_TIES

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise OutOfRange(f"fraction must be in (0, 1], got {self.fraction}")
        if not (0.0 <= self.min_coverage <= 1.0):
            raise OutOfRange(f"min_coverage must be in [0, 1], got {self.min_coverage}")


@dataclass(frozen=True)
class SelectionResult:
    selected_ids: List[str]
    corpus_size: int
    selected_citations: int
    total_citations: int
    coverage: float
    coverage_met: bool
    base_size: int = 0
    tie_policy: str = TiePolicy.INCLUDE_TIES.value

    @property
    def selected_count(self) -> int:
        return len(self.selected_ids)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SelectionResult":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__ if k in data})


def _citation_frame(corpus: Sequence[BibRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "record_id": [r.record_id for r in corpus],
            "times_cited": np.array([r.times_cited for r in corpus], dtype=np.int64),
        }
    )


def base_size(n: int, fraction: float) -> int:
    # guard against 0.3 * 10 == 2.9999999999999996
    return int(math.floor(fraction * n + 1e-9))


def select_top_cited(corpus: Sequence[BibRecord], cfg: SelectionConfig = SelectionConfig()) -> SelectionResult:
    """Select the top `fraction` of records by times_cited.

    Ordering is times_cited descending then record_id ascending. Under
    IncludeTies every record tied with the k-th count is also kept.
    """
    if not corpus:
        raise EmptyCorpus("cannot select from an empty corpus")
    df = _citation_frame(corpus)
    df = df.sort_values(by=["times_cited", "record_id"], ascending=[False, True], kind="mergesort")
    df = df.reset_index(drop=True)
    n = len(df)
    k = base_size(n, cfg.fraction)
    if k == 0:
        logger.warning("fraction %.4f of %d records rounds down to zero; nothing selected", cfg.fraction, n)
        chosen = df.head(0)
    elif cfg.tie_policy is TiePolicy.INCLUDE_TIES:
        cutoff = int(df["times_cited"].iloc[k - 1])
        chosen = df[df["times_cited"] >= cutoff]
        if len(chosen) > k:
            logger.info("tie at %d citations extends selection from %d to %d", cutoff, k, len(chosen))
    else:
        chosen = df.head(k)
    total = int(df["times_cited"].sum())
    selected_citations = int(chosen["times_cited"].sum())
    coverage = selected_citations / total if total > 0 else 0.0
    met = total > 0 and coverage >= cfg.min_coverage
    if not met:
        logger.warning(
            "selected %d record(s) cover %.1f%% of citations, below the %.1f%% target",
            len(chosen), coverage * 100.0, cfg.min_coverage * 100.0,
        )
    return SelectionResult(
        selected_ids=chosen["record_id"].tolist(),
        corpus_size=n,
        selected_citations=selected_citations,
        total_citations=total,
        coverage=coverage,
        coverage_met=bool(met),
        base_size=k,
        tie_policy=cfg.tie_policy.value,
    )


def citation_coverage(selected: Iterable[str], corpus: Sequence[BibRecord]) -> float:
    """Share of the corpus's citations held by `selected` ids."""
    df = _citation_frame(corpus)
    total = int(df["times_cited"].sum())
    if total <= 0:
        raise ZeroTotalCitations("corpus has no citations; coverage is undefined")
    wanted = set(selected)
    unknown = wanted.difference(df["record_id"])
    if unknown:
        raise KeyError(f"ids not in corpus: {sorted(unknown)[:5]}")
    part = int(df.loc[df["record_id"].isin(wanted), "times_cited"].sum())
    return part / total


def select_records(corpus: Sequence[BibRecord], result: SelectionResult) -> List[BibRecord]:
    by_id = {r.record_id: r for r in corpus}
    return [by_id[i] for i in result.selected_ids if i in by_id]


def selection_to_json(result: SelectionResult) -> bytes:
    return (json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n").encode("utf-8")
