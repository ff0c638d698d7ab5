from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import pandas as pd

from ..corpus.models import BibRecord
from ..errors import EmptyNetwork, MissingYear
from .matching import Ambiguity, ReferenceIndex, build_match_index, match_reference

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]
CHRONOLOGY_WARN_SHARE = 0.05


@dataclass(frozen=True)
class CitationNetwork:
    """Directed citation graph among selected records (citing -> cited).

    Nodes and edges are kept sorted so that every serialization is stable.
    """

    nodes: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    node_attrs: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    ambiguous_refs: int = 0

    def __post_init__(self):
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("duplicate node ids")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("duplicate edges")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside the node set")

    @classmethod
    def create(
        cls,
        nodes: Iterable[str],
        edges: Iterable[Edge],
        node_attrs: Optional[Mapping[str, Mapping[str, Any]]] = None,
        ambiguous_refs: int = 0,
    ) -> "CitationNetwork":
        nodes = tuple(sorted(set(nodes)))
        attrs = {n: dict((node_attrs or {}).get(n, {})) for n in nodes}
        return cls(nodes, tuple(sorted(set(edges))), attrs, ambiguous_refs)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def year(self, node: str) -> Optional[int]:
        return self.node_attrs.get(node, {}).get("year")

    def to_digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for n in self.nodes:
            g.add_node(n, **self.node_attrs.get(n, {}))
        g.add_edges_from(self.edges)
        return g

    def to_undirected(self) -> nx.Graph:
        """Simple undirected projection (mutual citations collapse to one edge)."""
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def subnetwork(self, keep: Iterable[str]) -> "CitationNetwork":
        keep = set(keep)
        return CitationNetwork.create(
            [n for n in self.nodes if n in keep],
            [(u, v) for u, v in self.edges if u in keep and v in keep],
            {n: a for n, a in self.node_attrs.items() if n in keep},
            self.ambiguous_refs,
        )

    def with_node_attr(self, name: str, values: Mapping[str, Any]) -> "CitationNetwork":
        attrs = {n: dict(a) for n, a in self.node_attrs.items()}
        for n in self.nodes:
            if n in values:
                attrs.setdefault(n, {})[name] = values[n]
        return CitationNetwork(self.nodes, self.edges, attrs, self.ambiguous_refs)

    def in_degree(self) -> Dict[str, int]:
        deg = {n: 0 for n in self.nodes}
        for _, v in self.edges:
            deg[v] += 1
        return deg

    def to_dict(self) -> Dict[str, Any]:
        return {
            "nodes": [{"id": n, **self.node_attrs.get(n, {})} for n in self.nodes],
            "edges": [{"source": u, "target": v} for u, v in self.edges],
            "ambiguous_refs": self.ambiguous_refs,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CitationNetwork":
        nodes, attrs = [], {}
        for item in data.get("nodes", []):
            item = dict(item)
            nid = str(item.pop("id"))
            nodes.append(nid)
            attrs[nid] = item
        edges = [(str(e["source"]), str(e["target"])) for e in data.get("edges", [])]
        return cls.create(nodes, edges, attrs, int(data.get("ambiguous_refs", 0)))


def network_to_json(net: CitationNetwork) -> bytes:
    return (json.dumps(net.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def network_from_json(data: bytes | str) -> CitationNetwork:
    return CitationNetwork.from_dict(json.loads(data))


def chronology_violations(net: CitationNetwork) -> List[Edge]:
    """Edges whose citing record is older than the cited one."""
    out = []
    for u, v in net.edges:
        yu, yv = net.year(u), net.year(v)
        if yu is not None and yv is not None and yu < yv:
            out.append((u, v))
    return out


def address_attrs(rec: BibRecord) -> Dict[str, Any]:
    """`has_address` plus the record's most frequent institution and country."""
    out: Dict[str, Any] = {"has_address": rec.has_address}
    for name in ("institution", "country"):
        values = [getattr(a, name) for a in rec.affiliations if getattr(a, name)]
        if values:
            out[name] = Counter(values).most_common(1)[0][0]
    return out


def build_network(
    selected: Sequence[BibRecord],
    synonyms: Optional[Mapping[str, str]] = None,
    index: Optional[ReferenceIndex] = None,
) -> CitationNetwork:
    """One node per selected record, one edge per resolved reference between them.

    References that do not resolve inside the selection are tallied per node as
    `external_refs`; a record citing itself adds no edge. Records without an
    address stay in the network with `has_address` false.
    """
    index = index if index is not None else build_match_index(selected, synonyms)
    ambiguities: List[Ambiguity] = []
    edges = set()
    attrs: Dict[str, Dict[str, Any]] = {}
    for rec in selected:
        external = 0
        for ref in rec.cited_refs:
            target = match_reference(ref, index, ambiguities)
            if target is None:
                external += 1
            elif target != rec.record_id:
                edges.add((rec.record_id, target))
        attrs[rec.record_id] = {
            "year": rec.year,
            "label": rec.label,
            "external_refs": external,
            **address_attrs(rec),
        }
    net = CitationNetwork.create(attrs.keys(), edges, attrs, ambiguous_refs=len(ambiguities))
    late = chronology_violations(net)
    if net.edges and len(late) / len(net.edges) > CHRONOLOGY_WARN_SHARE:
        logger.warning("%d of %d edges cite a newer record", len(late), len(net.edges))
    logger.info("network: %d nodes, %d edges, %d ambiguous refs", len(net.nodes), len(net.edges), net.ambiguous_refs)
    return net


def weak_components(net: CitationNetwork) -> List[List[str]]:
    """Weakly connected components, largest first, ties by smallest member id."""
    comps = [sorted(c) for c in nx.weakly_connected_components(net.to_digraph())]
    return sorted(comps, key=lambda c: (-len(c), c[0]))


def component_histogram(net: CitationNetwork) -> pd.DataFrame:
    sizes = pd.Series([len(c) for c in weak_components(net)], dtype="int64")
    if sizes.empty:
        return pd.DataFrame({"size": pd.Series(dtype="int64"), "count": pd.Series(dtype="int64")})
    hist = sizes.value_counts().rename_axis("size").reset_index(name="count")
    return hist.sort_values("size", ascending=False).reset_index(drop=True)


def largest_component(net: CitationNetwork) -> CitationNetwork:
    """Induced subgraph on the largest weakly connected component."""
    if not net.nodes:
        raise EmptyNetwork("network has no nodes")
    comps = weak_components(net)
    hist = component_histogram(net)
    logger.info(
        "components (size x count): %s",
        ", ".join(f"{s}x{c}" for s, c in zip(hist["size"], hist["count"])),
    )
    return net.subnetwork(comps[0])


def hierarchical_layering(net: CitationNetwork) -> Dict[str, int]:
    """Layer = dense rank of publication year, oldest year -> layer 0."""
    missing = [n for n in net.nodes if net.year(n) is None]
    if missing:
        raise MissingYear(missing)
    years = sorted({int(net.year(n)) for n in net.nodes})
    rank = {y: i for i, y in enumerate(years)}
    return {n: rank[int(net.year(n))] for n in net.nodes}


def layered_order(net: CitationNetwork, layering: Mapping[str, int]) -> List[str]:
    """Nodes by layer, then by descending in-degree, then by id."""
    indeg = net.in_degree()
    return sorted(net.nodes, key=lambda n: (layering[n], -indeg[n], n))
