from __future__ import annotations

import io
import json
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional

import networkx as nx

from ..errors import IdMismatch, UnknownFormat
from ..network.cluster import Partition
from ..network.graph import CitationNetwork, layered_order
from .colors import ClinicalScore

SHAPES = (
    "ellipse",
    "box",
    "triangle",
    "diamond",
    "hexagon",
    "octagon",
    "parallelogram",
    "invtriangle",
    "house",
    "pentagon",
)

# node attributes carried by the attribute-typed formats, in key order
NODE_ATTRS = (
    "label",
    "year",
    "layer",
    "rank",
    "cluster_id",
    "shape",
    "clinical_ratio",
    "fill",
    "external_refs",
    "has_address",
    "institution",
    "country",
)


class ExportFormat(Enum):
    GRAPHML = "graphml"
    DOT = "dot"
    JSON = "json"
    PAJEK = "pajek"

    @classmethod
    def parse(cls, value: "ExportFormat | str") -> "ExportFormat":
        if isinstance(value, ExportFormat):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise UnknownFormat(f"unknown export format {value!r} (expected graphml, dot, json or pajek)") from None

    @property
    def suffix(self) -> str:
        return ".net" if self is ExportFormat.PAJEK else "." + self.value


def shape_for_cluster(cluster_id: int) -> str:
    return SHAPES[(cluster_id - 1) % len(SHAPES)]


def _require_cover(name: str, nodes, mapping: Optional[Mapping[str, Any]]) -> None:
    if mapping is None:
        return
    missing = [n for n in nodes if n not in mapping]
    if missing:
        raise IdMismatch(f"{name} lacks nodes: {', '.join(missing[:5])}")


def node_table(
    net: CitationNetwork,
    scores: Mapping[str, ClinicalScore],
    partition: Partition,
    layering: Optional[Mapping[str, int]] = None,
) -> List[Dict[str, Any]]:
    """One attribute dict per node, in node-id order; None values mean 'absent'."""
    _require_cover("scores", net.nodes, scores)
    _require_cover("partition", net.nodes, partition.assignment)
    _require_cover("layering", net.nodes, layering)
    rank = {n: i for i, n in enumerate(layered_order(net, layering))} if layering is not None else {}
    out = []
    for n in net.nodes:
        attrs = net.node_attrs.get(n, {})
        cid = partition.assignment[n]
        score = scores[n]
        out.append(
            {
                "id": n,
                "label": attrs.get("label", n),
                "year": attrs.get("year"),
                "layer": layering[n] if layering is not None else None,
                "rank": rank.get(n),
                "cluster_id": cid,
                "shape": shape_for_cluster(cid),
                "clinical_ratio": score.ratio,
                "fill": score.hex,
                "external_refs": attrs.get("external_refs"),
                "has_address": attrs.get("has_address"),
                "institution": attrs.get("institution"),
                "country": attrs.get("country"),
            }
        )
    return out


def _graphml(net: CitationNetwork, rows: List[Dict[str, Any]]) -> bytes:
    g = nx.DiGraph()
    for row in rows:
        attrs = {name: row[name] for name in NODE_ATTRS if row.get(name) is not None}
        if "clinical_ratio" in attrs:
            attrs["clinical_ratio"] = float(attrs["clinical_ratio"])
        g.add_node(row["id"], **attrs)
    g.add_edges_from(net.edges)
    buf = io.BytesIO()
    nx.write_graphml_xml(g, buf)
    return buf.getvalue() + b"\n"


def _dot_quote(value: Any) -> str:
    text = str(value).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{text}"'


def _dot(net: CitationNetwork, rows: List[Dict[str, Any]]) -> bytes:
    lines = ["digraph transmap {", "  node [style=filled];"]
    for row in rows:
        parts = [f"label={_dot_quote(row['label'])}", f"shape={row['shape']}", f"fillcolor={_dot_quote(row['fill'])}"]
        for name in ("cluster_id", "year", "layer", "rank"):
            if row.get(name) is not None:
                parts.append(f"{name}={row[name]}")
        if row.get("clinical_ratio") is not None:
            parts.append(f"clinical_ratio={_dot_quote(repr(float(row['clinical_ratio'])))}")
        if row.get("has_address") is not None:
            parts.append(f"has_address={'true' if row['has_address'] else 'false'}")
        for name in ("institution", "country"):
            if row.get(name):
                parts.append(f"{name}={_dot_quote(row[name])}")
        lines.append(f"  {_dot_quote(row['id'])} [{', '.join(parts)}];")
    for u, v in net.edges:
        lines.append(f"  {_dot_quote(u)} -> {_dot_quote(v)};")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _json(net: CitationNetwork, rows: List[Dict[str, Any]]) -> bytes:
    nodes = [{k: v for k, v in row.items() if v is not None} for row in rows]
    body = {
        "nodes": nodes,
        "edges": [{"source": u, "target": v} for u, v in net.edges],
        "ambiguous_refs": net.ambiguous_refs,
    }
    return (json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _pajek(net: CitationNetwork, rows: List[Dict[str, Any]]) -> bytes:
    # Pajek vertex lines only carry string attributes
    g = nx.DiGraph()
    for row in rows:
        g.add_node(row["id"], shape=row["shape"], ic=row["fill"], cluster=str(row["cluster_id"]))
    g.add_edges_from(net.edges)
    return "".join(line + "\n" for line in nx.generate_pajek(g)).encode("utf-8")


_WRITERS = {
    ExportFormat.GRAPHML: _graphml,
    ExportFormat.DOT: _dot,
    ExportFormat.JSON: _json,
    ExportFormat.PAJEK: _pajek,
}


def export_graph(
    net: CitationNetwork,
    scores: Mapping[str, ClinicalScore],
    partition: Partition,
    layering: Optional[Mapping[str, int]],
    fmt: "ExportFormat | str",
) -> bytes:
    """Serialize the scored, clustered network; identical inputs give identical bytes."""
    kind = ExportFormat.parse(fmt)
    rows = node_table(net, scores, partition, layering)
    return _WRITERS[kind](net, rows)
