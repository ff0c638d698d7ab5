from __future__ import annotations

import io
import json
import xml.etree.ElementTree as ET

import networkx as nx
import pytest

from transmap.errors import IdMismatch, UnknownFormat
from transmap.network.cluster import Partition
from transmap.network.graph import CitationNetwork
from transmap.report.colors import ClinicalScore, color_for_ratio
from transmap.report.export import ExportFormat, export_graph, shape_for_cluster

GRAPHML_NS = {"g": "http://graphml.graphdrawing.org/xmlns"}

NET = CitationNetwork.create(
    ["a", "b"],
    [("b", "a")],
    {"a": {"year": 2000, "label": "A 2000"}, "b": {"year": 2001, "label": "B 2001"}},
)
PART = Partition.from_groups([["a", "b"]])
SCORES = {
    "a": ClinicalScore("a", 0.0, color_for_ratio(0.0)),
    "b": ClinicalScore("b", None, color_for_ratio(None)),
}
LAYERS = {"a": 0, "b": 1}


def _graphml_values(data: bytes):
    root = ET.fromstring(data)
    keys = {k.get("id"): k.get("attr.name") for k in root.findall("g:key", GRAPHML_NS)}
    out = {}
    for node in root.findall("g:graph/g:node", GRAPHML_NS):
        out[node.get("id")] = {keys[d.get("key")]: d.text for d in node.findall("g:data", GRAPHML_NS)}
    return out


def test_dot_golden(golden):
    assert export_graph(NET, SCORES, PART, LAYERS, "dot") == golden("two_nodes.dot")


def test_json_golden(golden):
    assert export_graph(NET, SCORES, PART, LAYERS, ExportFormat.JSON) == golden("two_nodes.json")


def test_graphml_is_written_by_the_networkx_writer():
    expected = nx.DiGraph()
    expected.add_node("a", label="A 2000", year=2000, layer=0, rank=0, cluster_id=1, shape="ellipse", clinical_ratio=0.0, fill="#FF0000")
    expected.add_node("b", label="B 2001", year=2001, layer=1, rank=1, cluster_id=1, shape="ellipse", fill="#808080")
    expected.add_edge("b", "a")
    buf = io.BytesIO()
    nx.write_graphml_xml(expected, buf)
    assert export_graph(NET, SCORES, PART, LAYERS, "graphml") == buf.getvalue() + b"\n"


def test_graphml_structure():
    data = export_graph(NET, SCORES, PART, LAYERS, ExportFormat.GRAPHML)
    assert data.startswith(b"<?xml")
    values = _graphml_values(data)
    assert set(values) == {"a", "b"}
    assert values["a"]["fill"] == "#FF0000"
    assert values["a"]["clinical_ratio"] == "0.0"
    assert "clinical_ratio" not in values["b"]
    assert values["b"]["layer"] == "1"
    g = nx.parse_graphml(data)
    assert g.is_directed()
    assert g.nodes["a"]["fill"] == "#FF0000" and g.nodes["a"]["year"] == 2000
    assert list(g.edges) == [("b", "a")]


def test_pajek_export():
    text = export_graph(NET, SCORES, PART, LAYERS, "pajek").decode("utf-8")
    lines = text.splitlines()
    assert lines[0] == "*vertices 2"
    assert "*arcs" in lines
    g = nx.parse_pajek(text)
    assert set(g.edges()) == {("b", "a")}
    assert g.nodes["a"]["ic"] == "#FF0000" and g.nodes["b"]["ic"] == "#808080"
    assert g.nodes["a"]["shape"] == "ellipse" and g.nodes["a"]["cluster"] == "1"
    assert ExportFormat.PAJEK.suffix == ".net"


def test_json_export():
    body = json.loads(export_graph(NET, SCORES, PART, None, "json"))
    assert body["edges"] == [{"source": "b", "target": "a"}]
    a, b = body["nodes"]
    assert a["clinical_ratio"] == 0.0 and "clinical_ratio" not in b
    assert "layer" not in a and "rank" not in a
    assert body["ambiguous_refs"] == 0


def test_json_export_reimports_to_the_same_network():
    net = CitationNetwork.create(
        ["a", "b", "c"],
        [("b", "a"), ("c", "a"), ("c", "b")],
        {
            "a": {"year": 2000, "label": "A 2000", "external_refs": 3, "has_address": False},
            "b": {"year": 2001, "label": "B 2001", "external_refs": 0, "has_address": True, "institution": "Univ Toronto", "country": "Canada"},
            "c": {"year": 2003, "label": "C 2003", "external_refs": 1, "has_address": True, "institution": "SNU", "country": "South Korea"},
        },
        ambiguous_refs=2,
    )
    part = Partition.from_groups([["a", "b"], ["c"]])
    scores = {n: ClinicalScore(n, r, color_for_ratio(r)) for n, r in (("a", 0.25), ("b", None), ("c", 1.0))}
    layers = {"a": 0, "b": 1, "c": 2}
    data = export_graph(net, scores, part, layers, "json")
    back = CitationNetwork.from_dict(json.loads(data))
    assert back.nodes == net.nodes
    assert back.edges == net.edges
    assert back.ambiguous_refs == 2
    for n in net.nodes:
        assert net.node_attrs[n].items() <= back.node_attrs[n].items()
    assert export_graph(back, scores, part, layers, "json") == data


def test_nodes_without_address_are_flagged_in_every_format():
    net = CitationNetwork.create(
        ["a", "b"],
        [("b", "a")],
        {
            "a": {"year": 2000, "label": "A 2000", "has_address": False},
            "b": {"year": 2001, "label": "B 2001", "has_address": True, "institution": "Univ Toronto", "country": "Canada"},
        },
    )
    dot = export_graph(net, SCORES, PART, LAYERS, "dot").decode("utf-8")
    line_a, line_b = [ln for ln in dot.splitlines() if ln.startswith(('  "a" [', '  "b" ['))]
    assert "has_address=false" in line_a and "institution=" not in line_a
    assert 'has_address=true, institution="Univ Toronto", country="Canada"' in line_b

    values = _graphml_values(export_graph(net, SCORES, PART, LAYERS, "graphml"))
    assert values["a"]["has_address"].lower() == "false"
    assert "institution" not in values["a"]
    assert values["b"]["institution"] == "Univ Toronto" and values["b"]["country"] == "Canada"

    a, b = json.loads(export_graph(net, SCORES, PART, LAYERS, "json"))["nodes"]
    assert a["has_address"] is False and "institution" not in a
    assert b["has_address"] is True and b["country"] == "Canada"


def test_single_node_network_gives_minimal_documents():
    net = CitationNetwork.create(["a"], [], {"a": {"year": 2000, "label": "A 2000"}})
    part = Partition.singletons(["a"])
    scores = {"a": SCORES["a"]}
    dot = export_graph(net, scores, part, {"a": 0}, "dot").decode("utf-8")
    assert dot == (
        "digraph transmap {\n"
        "  node [style=filled];\n"
        '  "a" [label="A 2000", shape=ellipse, fillcolor="#FF0000", cluster_id=1, year=2000, layer=0, rank=0, clinical_ratio="0.0"];\n'
        "}\n"
    )
    g = nx.parse_graphml(export_graph(net, scores, part, {"a": 0}, "graphml"))
    assert list(g.nodes) == ["a"] and g.number_of_edges() == 0
    body = json.loads(export_graph(net, scores, part, {"a": 0}, "json"))
    assert [n["id"] for n in body["nodes"]] == ["a"] and body["edges"] == []
    pajek = nx.parse_pajek(export_graph(net, scores, part, {"a": 0}, "pajek").decode("utf-8"))
    assert list(pajek.nodes) == ["a"] and pajek.number_of_edges() == 0


def test_exports_are_deterministic():
    for fmt in ExportFormat:
        assert export_graph(NET, SCORES, PART, LAYERS, fmt) == export_graph(NET, SCORES, PART, LAYERS, fmt)


def test_shapes_cycle():
    assert shape_for_cluster(1) == "ellipse"
    assert shape_for_cluster(2) == "box"
    assert shape_for_cluster(11) == "ellipse"


def test_rejects_unknown_format_and_missing_nodes():
    with pytest.raises(UnknownFormat):
        export_graph(NET, SCORES, PART, LAYERS, "svg")
    with pytest.raises(IdMismatch):
        export_graph(NET, {"a": SCORES["a"]}, PART, LAYERS, "dot")
    with pytest.raises(IdMismatch):
        export_graph(NET, SCORES, PART, {"a": 0}, "dot")
