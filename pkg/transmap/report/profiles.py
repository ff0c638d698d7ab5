from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import pandas as pd

from ..errors import IdMismatch
from ..network.cluster import Partition
from ..semantic.annotate import Annotation, clinical_ratio

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterProfile:
    cluster_id: int
    size: int
    term_freqs: Tuple[Tuple[str, int], ...]
    top_label: str
    mean_ratio: Optional[float] = None
    band: str = "unscored"

    def to_dict(self) -> Dict[str, object]:
        return {
            "cluster_id": self.cluster_id,
            "size": self.size,
            "top_label": self.top_label,
            "mean_ratio": self.mean_ratio,
            "band": self.band,
            "term_freqs": [list(tf) for tf in self.term_freqs],
        }


def band_for_ratio(ratio: Optional[float], basic_below: float = 0.33, clinical_above: float = 0.66) -> str:
    if ratio is None:
        return "unscored"
    if ratio < basic_below:
        return "basic"
    if ratio > clinical_above:
        return "clinical"
    return "mixed"


def _term_frame(partition: Partition, annotations: Mapping[str, Annotation]) -> pd.DataFrame:
    rows = [
        (cid, rid, term)
        for rid, cid in partition.assignment.items()
        for term in annotations[rid].matched
    ]
    return pd.DataFrame(rows, columns=["cluster_id", "record_id", "term_id"])


def cluster_profiles(
    partition: Partition,
    annotations: Mapping[str, Annotation],
    labels: Optional[Mapping[str, str]] = None,
    shared_fraction: float = 0.8,
    count: str = "unique",
    basic_below: float = 0.33,
    clinical_above: float = 0.66,
) -> List[ClusterProfile]:
    """Per-cluster document frequency of matched terms, plus mean clinical ratio.

    With two or more clusters, a term present in at least `shared_fraction` of
    them cannot be a cluster's top label.
    """
    missing = sorted(set(partition.assignment) - set(annotations))
    if missing:
        raise IdMismatch(f"no annotation for partition nodes: {', '.join(missing[:5])}")
    labels = labels or {}
    clusters = partition.clusters()
    k = len(clusters)

    df = _term_frame(partition, annotations)
    freqs = (
        df.groupby(["cluster_id", "term_id"]).size().rename("doc_count").reset_index()
        if not df.empty
        else pd.DataFrame(columns=["cluster_id", "term_id", "doc_count"])
    )
    shared = set()
    if k >= 2 and not freqs.empty:
        spread = freqs.groupby("term_id")["cluster_id"].nunique()
        shared = set(spread[spread >= shared_fraction * k].index)
        if shared:
            logger.info("%d terms shared by most clusters excluded from labels", len(shared))

    ratios = pd.Series(
        {rid: clinical_ratio(annotations[rid], count) for rid in partition.assignment}, dtype="float64"
    )
    out = []
    for cid, members in clusters.items():
        sub = freqs[freqs["cluster_id"] == cid].sort_values(
            ["doc_count", "term_id"], ascending=[False, True], kind="mergesort"
        )
        ranked = tuple((str(t), int(c)) for t, c in zip(sub["term_id"], sub["doc_count"]))
        top = next((t for t, _ in ranked if t not in shared), None)
        mean = ratios.loc[members].mean()
        mean_ratio = None if pd.isna(mean) else float(mean)
        out.append(
            ClusterProfile(
                cluster_id=cid,
                size=len(members),
                term_freqs=ranked,
                top_label=labels.get(top, top) if top else "",
                mean_ratio=mean_ratio,
                band=band_for_ratio(mean_ratio, basic_below, clinical_above),
            )
        )
    return out
