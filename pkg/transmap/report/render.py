from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import pandas as pd

from ..artifacts import RunArtifacts
from ..config import ReportSettings
from ..errors import IdMismatch
from ..network.graph import CitationNetwork, component_histogram
from .colors import ClinicalScore, score_documents
from .export import shape_for_cluster
from .leaderboard import country_distribution, institution_leaderboard
from .profiles import band_for_ratio, cluster_profiles

logger = logging.getLogger(__name__)

BANDS = ("basic", "mixed", "clinical", "unscored")
LEADING_TERMS = 3


def pct(x: float) -> str:
    return f"{100.0 * x:.1f}%"


def _fmt_ratio(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.2f}"


def _md_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> List[str]:
    out = ["| " + " | ".join(headers) + " |", "|" + "|".join("---" for _ in headers) + "|"]
    for row in rows:
        out.append("| " + " | ".join(str(c).replace("|", "\\|") for c in row) + " |")
    return out


@dataclass
class Report:
    markdown: str
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)

    def write(self, path: str) -> List[str]:
        """Write the Markdown file and one CSV per table beside it."""
        out_dir = os.path.dirname(os.path.abspath(path))
        os.makedirs(out_dir, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.markdown)
        written = [path]
        for name, df in sorted(self.tables.items()):
            csv_path = os.path.join(out_dir, f"{name}.csv")
            df.to_csv(csv_path, index=False, lineterminator="\n", float_format="%.6f")
            written.append(csv_path)
        return written


def clustered_network(art: RunArtifacts) -> CitationNetwork:
    extra = sorted(set(art.partition.assignment) - set(art.network.nodes))
    if extra:
        raise IdMismatch(f"partition names nodes missing from the network: {', '.join(extra[:5])}")
    return art.network.subnetwork(art.partition.assignment)


def render_report(
    art: RunArtifacts,
    settings: Optional[ReportSettings] = None,
    labels: Optional[Mapping[str, str]] = None,
    institutions: Optional[Mapping[str, str]] = None,
    countries: Optional[Mapping[str, str]] = None,
    count: str = "unique",
    scores: Optional[Mapping[str, ClinicalScore]] = None,
) -> Report:
    settings = settings or ReportSettings()
    sel = art.selection
    net = art.network
    sub = clustered_network(art)
    missing = sorted(set(sub.nodes) - set(art.annotations))
    if missing:
        raise IdMismatch(f"no annotation for network nodes: {', '.join(missing[:5])}")
    scores = scores if scores is not None else score_documents({n: art.annotations[n] for n in sub.nodes}, count)
    profiles = cluster_profiles(
        art.partition,
        art.annotations,
        labels=labels,
        shared_fraction=settings.shared_cluster_fraction,
        count=count,
        basic_below=settings.basic_below,
        clinical_above=settings.clinical_above,
    )
    by_id = {r.record_id: r for r in art.corpus}
    members = [by_id[n] for n in sub.nodes if n in by_id]
    board = institution_leaderboard(members, institutions, countries, top=settings.top_institutions)
    nations = country_distribution(members, countries)
    hist = component_histogram(net)

    lines = ["# Knowledge-translation map", "", "## Selection", ""]
    lines.append(f"- corpus: {sel.corpus_size} records, {sel.total_citations} citations")
    share = sel.selected_count / sel.corpus_size if sel.corpus_size else 0.0
    lines.append(f"- {sel.selected_count} ({pct(share)}) selected; coverage {pct(sel.coverage)}")
    lines.append(f"- selected records hold {sel.selected_citations} citations; tie policy: {sel.tie_policy}")
    if not sel.coverage_met:
        lines.append("- coverage is below the configured target")

    lines += ["", "## Citation network", ""]
    lines.append(f"- {len(net.nodes)} nodes, {net.edge_count} edges")
    external = sum(int(net.node_attrs.get(n, {}).get("external_refs") or 0) for n in net.nodes)
    lines.append(f"- references outside the selection: {external}; ambiguous: {net.ambiguous_refs}")
    if net.edge_count == 0:
        lines.append("- no citations resolved")
    lines.append(f"- clustered component: {len(sub.nodes)} nodes, {sub.edge_count} edges")
    lines += ["", *_md_table(["component size", "count"], hist.itertuples(index=False))]

    lines += ["", "## Subnetworks", ""]
    q = art.partition.modularity
    lines.append(f"- modularity: {'undefined' if q is None else f'{q:.4f}'}")
    lines.append(f"- clusters: {art.partition.cluster_count}")
    rows = []
    for p in profiles:
        lead = ", ".join(f"{(labels or {}).get(t, t)} ({c})" for t, c in p.term_freqs[:LEADING_TERMS])
        rows.append((p.cluster_id, shape_for_cluster(p.cluster_id), p.size, _fmt_ratio(p.mean_ratio), p.band, p.top_label or "-", lead or "-"))
    lines += ["", *_md_table(["cluster", "shape", "size", "mean clinical ratio", "band", "label", "leading terms"], rows)]

    doc_bands = pd.Series(
        [band_for_ratio(scores[n].ratio, settings.basic_below, settings.clinical_above) for n in sub.nodes],
        dtype="object",
    )
    band_counts = doc_bands.value_counts().reindex(list(BANDS), fill_value=0)
    lines += ["", "## Clinical scores", ""]
    lines += _md_table(["band", "documents"], [(b, int(c)) for b, c in band_counts.items()])

    lines += ["", "## Leading institutions", ""]
    if len(board):
        lines += _md_table(
            ["rank", "institution", "location", "papers"],
            [(i, r.name, r.location or "-", r.paper_count) for i, r in enumerate(board.rows, start=1)],
        )
    else:
        lines.append("- no affiliations recorded")

    lines += ["", "## Countries", ""]
    if nations:
        lines += _md_table(["country", "papers"], nations)
    else:
        lines.append("- no affiliations recorded")
    markdown = "\n".join(lines) + "\n"

    tables = {
        "components": hist,
        "clusters": pd.DataFrame(
            [(p.cluster_id, shape_for_cluster(p.cluster_id), p.size, p.mean_ratio, p.band, p.top_label) for p in profiles],
            columns=["cluster_id", "shape", "size", "mean_ratio", "band", "top_label"],
        ),
        "scores": pd.DataFrame(
            [
                (n, sub.node_attrs.get(n, {}).get("label", n), sub.year(n), art.partition.assignment[n], scores[n].ratio, scores[n].hex)
                for n in sub.nodes
            ],
            columns=["record_id", "label", "year", "cluster_id", "clinical_ratio", "fill"],
        ).astype({"year": "Int64"}),
        "institutions": board.to_frame(),
        "countries": pd.DataFrame(nations, columns=["country", "paper_count"]),
    }
    logger.info("report: %d clusters, %d institutions", len(profiles), len(board))
    return Report(markdown, tables)
