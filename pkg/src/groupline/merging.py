"""Merge annotation sets into global groups and measure inter-annotator agreement.

The merge builds a graph over the timeline's headlines with an edge wherever a
majority of annotators co-grouped the pair, then maximizes modularity with a
deterministic Louvain sweep.  Agreement between two groupings is scored with
max-normalized Adjusted Mutual Information.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import AnnotationSet, Partition

# Gains closer than this are treated as ties (broken toward the smallest
# community id); true nonzero gain gaps on graphs of a few hundred nodes are
# orders of magnitude larger.
_GAIN_EPS = 1e-12


@dataclass(frozen=True)
class CoGroupGraph:
    """Headline graph with an edge where >= majority_threshold annotators agree.

    ``edges`` keeps only pairs that met the threshold, keyed by the canonical
    (smaller id, larger id) tuple; the value is the vote count, retained for
    diagnostics.  Edge weights are binary once the threshold passes.
    """

    timeline_id: str
    nodes: tuple[str, ...]
    edges: Mapping[tuple[str, str], int]
    majority_threshold: int
    annotator_count: int

    def __post_init__(self) -> None:
        node_set = set(self.nodes)
        for (u, v), votes in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop on node {u!r}")
            if u > v:
                raise ValueError(f"edge {(u, v)!r} is not in canonical order")
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge {(u, v)!r} references unknown node")
            if votes < self.majority_threshold:
                raise ValueError(f"edge {(u, v)!r} below majority threshold")

    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {node: set() for node in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def majority_for(annotator_count: int) -> int:
    """Strict majority: 3 of 5, 3 of 4, 2 of 3."""
    return annotator_count // 2 + 1


def build_cogroup_graph(
    annotations: Sequence[AnnotationSet], majority: int | None = None
) -> CoGroupGraph:
    """Count co-group votes per headline pair and keep edges with enough votes."""
    if not annotations:
        raise ValueError("need at least one annotation set")
    timeline_ids = {a.timeline_id for a in annotations}
    if len(timeline_ids) != 1:
        raise ValueError(f"annotation sets cover different timelines: {sorted(timeline_ids)}")
    node_sets = [frozenset(a.assignment) for a in annotations]
    if len(set(node_sets)) != 1:
        raise ValueError("annotation sets cover different headline sets")

    count = len(annotations)
    if majority is None:
        majority = majority_for(count)
    if not 1 <= majority <= count:
        raise ValueError(f"majority must be in [1, {count}], got {majority}")

    votes: dict[tuple[str, str], int] = {}
    for annotation in annotations:
        buckets: dict[int, list[str]] = {}
        for hid, group in annotation.assignment.items():
            buckets.setdefault(group, []).append(hid)
        for members in buckets.values():
            members.sort()
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    key = (members[i], members[j])
                    votes[key] = votes.get(key, 0) + 1

    edges = {pair: n for pair, n in sorted(votes.items()) if n >= majority}
    return CoGroupGraph(
        timeline_id=annotations[0].timeline_id,
        nodes=tuple(sorted(node_sets[0])),
        edges=edges,
        majority_threshold=majority,
        annotator_count=count,
    )


def modularity(graph: CoGroupGraph, partition: Partition) -> float:
    """Newman modularity of a partition over the co-group graph, unit edge weights.

    Q = sum_c [ e_c/m - (d_c/2m)^2 ], and 0 by convention for edgeless graphs.
    """
    missing = [node for node in graph.nodes if node not in partition.groups]
    if missing:
        raise ValueError(f"partition missing graph nodes: {missing}")
    m = graph.edge_count()
    if m == 0:
        return 0.0
    internal: dict[int, int] = {}
    degree_sum: dict[int, int] = {}
    for u, v in graph.edges:
        cu, cv = partition.groups[u], partition.groups[v]
        degree_sum[cu] = degree_sum.get(cu, 0) + 1
        degree_sum[cv] = degree_sum.get(cv, 0) + 1
        if cu == cv:
            internal[cu] = internal.get(cu, 0) + 1
    q = 0.0
    communities = set(degree_sum)
    for c in communities:
        q += internal.get(c, 0) / m - (degree_sum.get(c, 0) / (2 * m)) ** 2
    return q


def louvain_partition(graph: CoGroupGraph, resolution: float = 1.0, seed: int = 0) -> Partition:
    """Greedy modularity-maximizing grouping of the co-group graph.

    Fully deterministic: nodes are swept in ascending id order and improving-move
    ties break toward the smallest candidate community id, so the ``seed``
    argument (kept for CLI symmetry) does not influence the result.  Isolated
    nodes stay singletons; the result never scores below the all-singleton
    partition.
    """
    del seed
    adjacency: dict[str, dict[str, float]] = {node: {} for node in graph.nodes}
    for u, v in graph.edges:
        adjacency[u][v] = 1.0
        adjacency[v][u] = 1.0
    communities = _louvain_communities(adjacency, resolution)
    groups: dict[str, int] = {}
    for gid, members in enumerate(sorted(communities, key=min)):
        for node in members:
            groups[node] = gid
    return Partition(graph.timeline_id, groups)


def _louvain_communities(
    adjacency: Mapping[str, Mapping[str, float]], resolution: float
) -> list[set[str]]:
    order = sorted(adjacency)
    index = {node: i for i, node in enumerate(order)}
    adj: dict[int, dict[int, float]] = {
        index[v]: {index[u]: w for u, w in nbrs.items()} for v, nbrs in adjacency.items()
    }
    members: dict[int, set[str]] = {index[v]: {v} for v in order}

    while True:
        moved, assignment = _one_level(adj, resolution)
        if not moved:
            return [members[node] for node in sorted(adj)]
        grouped: dict[int, list[int]] = {}
        for node in sorted(adj):
            grouped.setdefault(assignment[node], []).append(node)
        remap = {community: i for i, community in enumerate(sorted(grouped))}
        new_members = {
            remap[community]: set().union(*(members[n] for n in nodes))
            for community, nodes in grouped.items()
        }
        new_adj: dict[int, dict[int, float]] = {i: {} for i in range(len(grouped))}
        for v, nbrs in adj.items():
            cv = remap[assignment[v]]
            for u, w in nbrs.items():
                if u == v:
                    new_adj[cv][cv] = new_adj[cv].get(cv, 0.0) + w
                else:
                    cu = remap[assignment[u]]
                    if cu == cv:
                        # internal edges are visited from both endpoints
                        new_adj[cv][cv] = new_adj[cv].get(cv, 0.0) + w / 2.0
                    else:
                        new_adj[cv][cu] = new_adj[cv].get(cu, 0.0) + w
        adj = new_adj
        members = new_members


def _one_level(adj: Mapping[int, Mapping[int, float]], resolution: float) -> tuple[bool, dict[int, int]]:
    """One Louvain local-move phase; returns (any node moved, node -> community)."""
    nodes = sorted(adj)
    degree = {
        v: sum(w for u, w in adj[v].items() if u != v) + 2.0 * adj[v].get(v, 0.0) for v in nodes
    }
    two_m = sum(degree.values())
    community = {v: v for v in nodes}
    if two_m == 0.0:
        return False, community
    community_degree = {v: degree[v] for v in nodes}

    improved = False
    while True:
        moved = False
        for v in nodes:
            home = community[v]
            weight_to: dict[int, float] = {}
            for u, w in adj[v].items():
                if u != v:
                    c = community[u]
                    weight_to[c] = weight_to.get(c, 0.0) + w
            community_degree[home] -= degree[v]
            best = home
            best_gain = weight_to.get(home, 0.0) - resolution * community_degree[home] * degree[v] / two_m
            for c in sorted(weight_to):
                if c == home:
                    continue
                gain = weight_to[c] - resolution * community_degree[c] * degree[v] / two_m
                if gain > best_gain + _GAIN_EPS:
                    best_gain = gain
                    best = c
            community_degree[best] += degree[v]
            community[v] = best
            if best != home:
                moved = True
                improved = True
        if not moved:
            return improved, community


def merge_annotations(
    annotations: Sequence[AnnotationSet], *, resolution: float = 1.0, seed: int = 0
) -> Partition:
    """Majority-edge graph + Louvain over >= 1 annotation sets of one timeline."""
    graph = build_cogroup_graph(annotations, majority=majority_for(len(annotations)))
    return louvain_partition(graph, resolution=resolution, seed=seed)


# ---------------------------------------------------------------------------
# Adjusted Mutual Information (max-normalized) and leave-one-out agreement
# ---------------------------------------------------------------------------


def adjusted_mutual_information(p: Partition, q: Partition) -> float:
    """Chance-corrected agreement between two partitions of the same node set."""
    if set(p.groups) != set(q.groups):
        raise ValueError("partitions cover different node sets")
    items = sorted(p.groups)
    labels_p = [p.groups[i] for i in items]
    labels_q = [q.groups[i] for i in items]
    return _ami_max(labels_p, labels_q)


def _ami_max(labels_u: Sequence[int], labels_v: Sequence[int]) -> float:
    n = len(labels_u)
    if n == 0:
        return 1.0
    classes_u = sorted(set(labels_u))
    classes_v = sorted(set(labels_v))
    if len(classes_u) == len(classes_v) == 1:
        return 1.0
    if len(classes_u) == n and len(classes_v) == n:
        # both all-singletons: necessarily the same partition, and the only
        # case where max(H) - EMI is exactly zero
        return 1.0

    iu = {c: i for i, c in enumerate(classes_u)}
    iv = {c: i for i, c in enumerate(classes_v)}
    contingency = [[0] * len(classes_v) for _ in classes_u]
    for lu, lv in zip(labels_u, labels_v):
        contingency[iu[lu]][iv[lv]] += 1
    a = [sum(row) for row in contingency]
    b = [sum(col) for col in zip(*contingency)]

    mi = 0.0
    for i, row in enumerate(contingency):
        for j, nij in enumerate(row):
            if nij > 0:
                mi += (nij / n) * math.log(n * nij / (a[i] * b[j]))
    emi = _expected_mutual_information(a, b, n)
    h_u = -sum((ai / n) * math.log(ai / n) for ai in a)
    h_v = -sum((bj / n) * math.log(bj / n) for bj in b)

    denominator = max(h_u, h_v) - emi
    eps = math.ulp(1.0)
    if denominator < 0:
        denominator = min(denominator, -eps)
    else:
        denominator = max(denominator, eps)
    return (mi - emi) / denominator


def _expected_mutual_information(a: Sequence[int], b: Sequence[int], n: int) -> float:
    """Expected MI of two labelings with fixed marginals under the permutation model."""
    lgamma = math.lgamma
    log = math.log
    log_n = log(n)
    total = 0.0
    for ai in a:
        for bj in b:
            start = max(1, ai + bj - n)
            stop = min(ai, bj)
            for nij in range(start, stop + 1):
                term = (nij / n) * (log_n + log(nij) - log(ai) - log(bj))
                log_weight = (
                    lgamma(ai + 1)
                    + lgamma(bj + 1)
                    + lgamma(n - ai + 1)
                    + lgamma(n - bj + 1)
                    - lgamma(n + 1)
                    - lgamma(nij + 1)
                    - lgamma(ai - nij + 1)
                    - lgamma(bj - nij + 1)
                    - lgamma(n - ai - bj + nij + 1)
                )
                total += term * math.exp(log_weight)
    return total


@dataclass(frozen=True)
class AgreementReport:
    """Per-annotator leave-one-out AMI scores."""

    per_annotator: Mapping[str, float]

    @property
    def average(self) -> float:
        scores = list(self.per_annotator.values())
        return sum(scores) / len(scores) if scores else 0.0

    def to_dict(self) -> dict:
        return {
            "per_annotator": {k: self.per_annotator[k] for k in sorted(self.per_annotator)},
            "average": self.average,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def leave_one_out_agreement(
    annotations: Sequence[AnnotationSet], *, resolution: float = 1.0
) -> AgreementReport:
    """Score each annotator against the merge of all the other annotators."""
    if len(annotations) < 3:
        raise ValueError("leave-one-out agreement needs at least 3 annotation sets")
    ids = [a.annotator_id for a in annotations]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate annotator ids: {ids}")
    scores: dict[str, float] = {}
    for held_out_index, annotation in enumerate(annotations):
        rest = [a for i, a in enumerate(annotations) if i != held_out_index]
        reference = merge_annotations(rest, resolution=resolution)
        scores[annotation.annotator_id] = adjusted_mutual_information(
            annotation.to_partition(), reference
        )
    return AgreementReport(scores)
