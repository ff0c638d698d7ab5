from __future__ import annotations

import pytest

from transmap.errors import IdMismatch
from transmap.network.cluster import Partition
from transmap.report.profiles import band_for_ratio, cluster_profiles
from transmap.semantic.annotate import Annotation


def _ann(rid, clinical=(), other=()):
    return Annotation(rid, frozenset(clinical) | frozenset(other), len(clinical), len(other))


PART = Partition.from_groups([["a", "b"], ["c", "d"], ["e"]])
ANNOTATIONS = {
    "a": _ann("a", clinical=["T1"], other=["X"]),
    "b": _ann("b", other=["T1", "X"]),
    "c": _ann("c", clinical=["T1", "Y"]),
    "d": _ann("d", clinical=["Y"]),
    "e": _ann("e", clinical=["Z"], other=["T1"]),
}


def test_shared_terms_do_not_label_clusters():
    profiles = cluster_profiles(PART, ANNOTATIONS, labels={"X": "Xylem"})
    assert [p.cluster_id for p in profiles] == [1, 2, 3]
    assert [p.size for p in profiles] == [2, 2, 1]
    assert profiles[0].term_freqs == (("T1", 2), ("X", 2))
    assert [p.top_label for p in profiles] == ["Xylem", "Y", "Z"]


def test_mean_ratio_and_band():
    profiles = cluster_profiles(PART, ANNOTATIONS)
    assert [p.mean_ratio for p in profiles] == [0.25, 1.0, 0.5]
    assert [p.band for p in profiles] == ["basic", "clinical", "mixed"]


def test_single_cluster_keeps_common_terms():
    part = Partition.from_groups([["a", "b"]])
    (profile,) = cluster_profiles(part, {k: ANNOTATIONS[k] for k in "ab"})
    assert profile.top_label == "T1"


def test_ties_break_on_term_id():
    part = Partition.from_groups([["a"]])
    (profile,) = cluster_profiles(part, {"a": _ann("a", other=["Q9", "Q1", "Q5"])})
    assert profile.top_label == "Q1"


def test_unannotated_cluster_is_unscored():
    part = Partition.from_groups([["a", "b"]])
    (profile,) = cluster_profiles(part, {"a": Annotation("a"), "b": Annotation("b")})
    assert profile.top_label == ""
    assert profile.mean_ratio is None
    assert profile.band == "unscored"
    assert profile.to_dict()["term_freqs"] == []


def test_missing_annotation():
    with pytest.raises(IdMismatch):
        cluster_profiles(PART, {"a": ANNOTATIONS["a"]})


@pytest.mark.parametrize(
    "ratio,band",
    [(None, "unscored"), (0.0, "basic"), (0.3299, "basic"), (0.33, "mixed"), (0.66, "mixed"), (0.6601, "clinical"), (1.0, "clinical")],
)
def test_band_boundaries(ratio, band):
    assert band_for_ratio(ratio) == band
