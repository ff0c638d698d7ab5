from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..errors import EdgelessNetwork, EmptyNetwork, IdMismatch, TooLarge
from .graph import CitationNetwork

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_NODES = 12
_EPS = 1e-12


@dataclass(frozen=True)
class Partition:
    """Node -> cluster id, ids dense from 1 and ordered by size then smallest member."""

    assignment: Dict[str, int]
    modularity: Optional[float] = None

    def __post_init__(self):
        ids = set(self.assignment.values())
        if ids != set(range(1, len(ids) + 1)):
            raise ValueError(f"cluster ids must be 1..k, got {sorted(ids)}")

    @property
    def cluster_count(self) -> int:
        return len(set(self.assignment.values()))

    def clusters(self) -> Dict[int, List[str]]:
        out: Dict[int, List[str]] = {}
        for node in sorted(self.assignment):
            out.setdefault(self.assignment[node], []).append(node)
        return dict(sorted(out.items()))

    def communities(self) -> List[set]:
        return [set(m) for m in self.clusters().values()]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "assignment": dict(sorted(self.assignment.items())),
            "cluster_count": self.cluster_count,
            "modularity": self.modularity,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Partition":
        q = data.get("modularity")
        return cls(
            {str(k): int(v) for k, v in data["assignment"].items()},
            None if q is None else float(q),
        )

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[str]], modularity: Optional[float] = None) -> "Partition":
        return cls(canonical_labels(groups), modularity)

    @classmethod
    def singletons(cls, nodes: Iterable[str]) -> "Partition":
        return cls.from_groups([[n] for n in nodes], None)


def partition_to_json(p: Partition, **params: Any) -> bytes:
    body = p.to_dict()
    if params:
        body["params"] = dict(sorted(params.items()))
    return (json.dumps(body, indent=2, sort_keys=True) + "\n").encode("utf-8")


def partition_from_json(data: bytes | str) -> Partition:
    return Partition.from_dict(json.loads(data))


def canonical_labels(groups: Iterable[Iterable[str]]) -> Dict[str, int]:
    """Label groups 1..k by descending size, then by smallest member id."""
    ordered = sorted((sorted(g) for g in groups if g), key=lambda g: (-len(g), g[0]))
    return {node: cid for cid, g in enumerate(ordered, start=1) for node in g}


def _check_covers(net: CitationNetwork, assignment: Mapping[str, int]) -> None:
    if set(assignment) != set(net.nodes):
        missing = sorted(set(net.nodes) - set(assignment))
        extra = sorted(set(assignment) - set(net.nodes))
        raise IdMismatch(f"partition does not cover the network (missing {missing[:5]}, extra {extra[:5]})")


def modularity(net: CitationNetwork, partition: Partition | Mapping[str, int], resolution: float = 1.0) -> float:
    """Newman modularity of `partition` on the undirected simple projection."""
    assignment = partition.assignment if isinstance(partition, Partition) else dict(partition)
    _check_covers(net, assignment)
    g = net.to_undirected()
    if g.number_of_edges() == 0:
        raise EdgelessNetwork("modularity is undefined without edges")
    groups: Dict[int, set] = {}
    for node, cid in assignment.items():
        groups.setdefault(cid, set()).add(node)
    return float(nx.community.modularity(g, list(groups.values()), resolution=resolution))


def _refine(g: nx.Graph, groups: List[set], resolution: float) -> List[set]:
    """Single-node moves between neighbouring clusters while any strictly improves Q."""
    m = g.number_of_edges()
    deg = dict(g.degree())
    label = {n: i for i, grp in enumerate(groups) for n in grp}
    tot = [sum(deg[n] for n in grp) for grp in groups]
    moved = True
    sweeps = 0
    while moved and sweeps < 50:
        moved = False
        sweeps += 1
        for node in sorted(g.nodes):
            a = label[node]
            k_i = deg[node]
            if k_i == 0:
                continue
            links: Dict[int, int] = {}
            for nbr in g.neighbors(node):
                links[label[nbr]] = links.get(label[nbr], 0) + 1
            stay = links.get(a, 0) / m - resolution * k_i * (tot[a] - k_i) / (2 * m * m)
            best, best_gain = a, 0.0
            for b in sorted(links):
                if b == a:
                    continue
                gain = links[b] / m - resolution * k_i * tot[b] / (2 * m * m) - stay
                if gain > best_gain + _EPS:
                    best, best_gain = b, gain
            if best != a:
                label[node] = best
                tot[a] -= k_i
                tot[best] += k_i
                moved = True
    out: Dict[int, set] = {}
    for n, c in label.items():
        out.setdefault(c, set()).add(n)
    return list(out.values())


def _better(q: float, k: int, key: Tuple, best: Optional[Tuple[float, int, Tuple]]) -> bool:
    if best is None:
        return True
    bq, bk, bkey = best
    if q > bq + _EPS:
        return True
    if q < bq - _EPS:
        return False
    return (k, key) < (bk, bkey)


def _structural_order(g: nx.Graph) -> List[str]:
    """Nodes by degree, then by the sorted degrees of their neighbours; ids only break exact ties."""
    deg = dict(g.degree())
    return sorted(g.nodes, key=lambda n: (-deg[n], sorted((deg[v] for v in g.neighbors(n)), reverse=True), n))


def _ordered_copy(g: nx.Graph, order: Sequence[str]) -> nx.Graph:
    rank = {n: i for i, n in enumerate(order)}
    out = nx.Graph()
    out.add_nodes_from(order)
    out.add_edges_from(sorted((tuple(sorted(e, key=rank.__getitem__)) for e in g.edges), key=lambda e: (rank[e[0]], rank[e[1]])))
    return out


def detect_subnets(
    net: CitationNetwork,
    seed: int = 42,
    resolution: float = 1.0,
    restarts: int = 10,
) -> Partition:
    """Multi-level greedy modularity maximization (local moving plus aggregation).

    Each restart runs the multi-level optimizer twice with a seed derived from
    `seed`: once over nodes in id order and once over a structural order that
    does not depend on ids. Every result gets a node-level refinement sweep and
    the best Q wins. The single-cluster partition is always a candidate;
    near-ties prefer fewer clusters.
    """
    g = net.to_undirected()
    if g.number_of_edges() == 0:
        raise EdgelessNetwork("cannot cluster a network without edges")
    by_id = _ordered_copy(g, sorted(g.nodes))
    by_shape = _ordered_copy(g, _structural_order(g))

    candidates: List[List[set]] = [[set(by_id.nodes)]]
    for r in range(max(1, int(restarts))):
        for ordered in (by_id, by_shape):
            found = nx.community.louvain_communities(ordered, resolution=resolution, seed=seed + r)
            candidates.append(_refine(by_id, [set(c) for c in found], resolution))

    best: Optional[Tuple[float, int, Tuple]] = None
    best_groups: List[set] = candidates[0]
    for groups in candidates:
        q = float(nx.community.modularity(by_id, groups, resolution=resolution))
        labels = canonical_labels(groups)
        key = tuple(labels[n] for n in sorted(labels))
        if _better(q, len(groups), key, best):
            best, best_groups = (q, len(groups), key), groups
    part = Partition.from_groups(best_groups, best[0] if best else None)
    logger.info("subnets: %d clusters, Q=%.4f (seed=%d, restarts=%d)", part.cluster_count, part.modularity, seed, restarts)
    return part


@lru_cache(maxsize=None)
def _growth_strings(n: int) -> np.ndarray:
    """All restricted growth strings of length n in lexicographic order (one per set partition)."""
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        values = (np.arange(int(counts.sum())) - starts).astype(np.int8)
        rows = np.column_stack([np.repeat(rows, counts, axis=0), values])
        top = np.maximum(np.repeat(top, counts), values)
    rows.setflags(write=False)
    return rows


def brute_force_partition(net: CitationNetwork) -> Partition:
    """Exhaustive max-modularity partition for small networks.

    Ties prefer fewer clusters, then the lexicographically smallest assignment
    over nodes in id order.
    """
    n = len(net.nodes)
    if n == 0:
        raise EmptyNetwork("network has no nodes")
    if n > BRUTE_FORCE_MAX_NODES:
        raise TooLarge(f"{n} nodes exceeds the exhaustive limit of {BRUTE_FORCE_MAX_NODES}")
    g = net.to_undirected()
    m = g.number_of_edges()
    if m == 0:
        raise EdgelessNetwork("modularity is undefined without edges")
    pos = {node: i for i, node in enumerate(net.nodes)}
    rgs = _growth_strings(n)
    deg = np.array([g.degree(node) for node in net.nodes], dtype=np.float64)

    intra = np.zeros(len(rgs), dtype=np.float64)
    for u, v in g.edges:
        intra += rgs[:, pos[u]] == rgs[:, pos[v]]
    spread = np.zeros(len(rgs), dtype=np.float64)
    for c in range(n):
        d_c = (rgs == c) @ deg
        spread += d_c * d_c
    q = intra / m - spread / (4.0 * m * m)

    k = rgs.max(axis=1).astype(np.int64) + 1
    near = np.flatnonzero(q >= q.max() - _EPS)
    # growth strings are already in lexicographic order
    winner = near[np.argmin(k[near])]
    groups: Dict[int, List[str]] = {}
    for node, c in zip(net.nodes, rgs[winner]):
        groups.setdefault(int(c), []).append(node)
    return Partition.from_groups(groups.values(), float(q[winner]))
