"""Degree and weighted-degree centrality with top-k rankings.

Degree counts the links that originate from or terminate in a bucket;
weighted degree sums their weights. A mutual pair of links contributes two
to each endpoint's degree. Everything here is a pure read over a graph
snapshot, recomputed on demand; at desk scale a full edge scan is cheap.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

from .errors import UnknownBucket
from .graph import LinkGraph

METRIC_DEGREE = "degree"
METRIC_WEIGHTED = "weighted"


@dataclass(frozen=True)
class CentralityScore:
    bucket: str
    degree: int
    weighted_degree: float


def degree_centrality(graph: LinkGraph, bucket: str) -> int:
    """Count of out-edges plus in-edges of the bucket."""
    if not graph.has_node(bucket):
        raise UnknownBucket(f"unknown bucket: {bucket}")
    return len(graph.out_links(bucket)) + len(graph.in_links(bucket))


def weighted_degree_centrality(graph: LinkGraph, bucket: str) -> float:
    """Sum of the weights of all out- and in-edges of the bucket."""
    if not graph.has_node(bucket):
        raise UnknownBucket(f"unknown bucket: {bucket}")
    return sum(graph.out_links(bucket).values()) + sum(graph.in_links(bucket).values())


def score(graph: LinkGraph, bucket: str) -> CentralityScore:
    return CentralityScore(
        bucket=bucket,
        degree=degree_centrality(graph, bucket),
        weighted_degree=weighted_degree_centrality(graph, bucket),
    )


def top_k(graph: LinkGraph, k: int, metric: str = METRIC_DEGREE) -> list[CentralityScore]:
    """The k highest-scoring buckets, descending, ties by id ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if metric not in (METRIC_DEGREE, METRIC_WEIGHTED):
        raise ValueError(f"unknown metric: {metric}")
    scores = [score(graph, b) for b in graph.nodes]
    if metric == METRIC_DEGREE:
        scores.sort(key=lambda s: (-s.degree, s.bucket))
    else:
        scores.sort(key=lambda s: (-s.weighted_degree, s.bucket))
    return scores[:k]


def rankings_csv(graph: LinkGraph) -> str:
    """Full rankings as CSV: bucket, degree, weighted_degree, rank_degree,
    rank_weighted. Ranks are 1-based positions in each metric's ordering."""
    scores = [score(graph, b) for b in graph.nodes]
    by_degree = sorted(scores, key=lambda s: (-s.degree, s.bucket))
    by_weighted = sorted(scores, key=lambda s: (-s.weighted_degree, s.bucket))
    rank_degree = {s.bucket: i + 1 for i, s in enumerate(by_degree)}
    rank_weighted = {s.bucket: i + 1 for i, s in enumerate(by_weighted)}

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bucket", "degree", "weighted_degree", "rank_degree", "rank_weighted"])
    for s in by_degree:
        writer.writerow(
            [s.bucket, s.degree, repr(s.weighted_degree), rank_degree[s.bucket], rank_weighted[s.bucket]]
        )
    return out.getvalue()
