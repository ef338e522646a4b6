"""Traversal hierarchies and path-product relationship weights.

From a root bucket (normally the portal) the graph's heaviest links are
expanded breadth-first into a bounded tree. The same bucket may appear in
several branches, but never twice on one root-to-leaf path, so every
occurrence corresponds to exactly one simple path from the root.

After normalizing edge weights by the tree's maximum, the relationship
weight between the root and a bucket is the sum over all root-to-bucket
paths of the product of edge weights along each path. A direct child
reached one way therefore scores exactly its normalized link weight, and
deeper or multiply-reachable buckets accumulate their path products.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field

from .errors import (
    ConstantSeries,
    EmptyTree,
    InsufficientData,
    TargetNotInTree,
    UnknownBucket,
)
from .graph import LinkGraph

DEFAULT_DEPTH_LIMIT = 3
DEFAULT_BRANCH_LIMIT = 3
# Strictly above the customary 0.5 starting weight, so never-traversed
# initial links stay out of the hierarchy.
DEFAULT_MIN_WEIGHT = 0.6


@dataclass
class HierarchyNode:
    """One occurrence of a bucket in the tree. weight is the edge weight
    from the parent; None at the root."""

    bucket: str
    weight: float | None
    children: list["HierarchyNode"] = field(default_factory=list)

    def walk(self) -> "list[HierarchyNode]":
        """All nodes of the subtree in depth-first order."""
        nodes = [self]
        for child in self.children:
            nodes.extend(child.walk())
        return nodes


@dataclass
class HierarchyTree:
    root: HierarchyNode
    depth_limit: int
    branch_limit: int
    min_weight: float

    def buckets(self) -> set[str]:
        """Distinct bucket ids appearing anywhere in the tree."""
        return {node.bucket for node in self.root.walk()}

    def edge_weights(self) -> list[float]:
        return [node.weight for node in self.root.walk() if node.weight is not None]

    @property
    def edge_count(self) -> int:
        return len(self.root.walk()) - 1


def extract_hierarchy(
    graph: LinkGraph,
    root: str,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    branch_limit: int = DEFAULT_BRANCH_LIMIT,
    min_weight: float = DEFAULT_MIN_WEIGHT,
) -> HierarchyTree:
    """Expand the top-weighted links breadth-first from root.

    Each node takes its branch_limit heaviest outgoing links at or above
    min_weight, skipping targets already on the path from the root to the
    node. Deterministic: ties order by target id.
    """
    if not graph.has_node(root):
        raise UnknownBucket(f"unknown bucket: {root}")
    if depth_limit < 1 or branch_limit < 1:
        raise ValueError("depth_limit and branch_limit must be >= 1")

    root_node = HierarchyNode(bucket=root, weight=None)
    # Queue entries: (node, ids on the path from root to node, depth).
    queue: list[tuple[HierarchyNode, frozenset[str], int]] = [
        (root_node, frozenset({root}), 0)
    ]
    while queue:
        node, path, depth = queue.pop(0)
        if depth >= depth_limit:
            continue
        candidates = [
            (target, weight)
            for target, weight in graph.ranked_links(node.bucket)
            if weight >= min_weight and target not in path
        ]
        for target, weight in candidates[:branch_limit]:
            child = HierarchyNode(bucket=target, weight=weight)
            node.children.append(child)
            queue.append((child, path | {target}, depth + 1))
    return HierarchyTree(
        root=root_node,
        depth_limit=depth_limit,
        branch_limit=branch_limit,
        min_weight=min_weight,
    )


def normalize_weights(tree: HierarchyTree) -> HierarchyTree:
    """New tree with every edge weight divided by the maximum edge weight,
    so weights land in (0, 1] and the heaviest edge becomes exactly 1.0."""
    weights = tree.edge_weights()
    if not weights:
        raise EmptyTree("hierarchy has no edges to normalize")
    peak = max(weights)

    def scale(node: HierarchyNode) -> HierarchyNode:
        return HierarchyNode(
            bucket=node.bucket,
            weight=None if node.weight is None else node.weight / peak,
            children=[scale(child) for child in node.children],
        )

    return HierarchyTree(
        root=scale(tree.root),
        depth_limit=tree.depth_limit,
        branch_limit=tree.branch_limit,
        min_weight=tree.min_weight,
    )


def relationship_weight(tree: HierarchyTree, target: str) -> float:
    """Sum over all root-to-target paths of the product of edge weights.

    Expects a normalized tree. The root scores 1.0 by convention (empty
    product over a zero-length path).
    """
    if target == tree.root.bucket:
        return 1.0
    total = 0.0
    found = False

    def descend(node: HierarchyNode, product: float) -> None:
        nonlocal total, found
        for child in node.children:
            assert child.weight is not None
            p = product * child.weight
            if child.bucket == target:
                total += p
                found = True
            descend(child, p)

    descend(tree.root, 1.0)
    if not found:
        raise TargetNotInTree(f"bucket {target!r} not in hierarchy")
    return total


def all_relationship_weights(tree: HierarchyTree) -> dict[str, float]:
    """Relationship weight of every bucket in the tree, root excluded."""
    totals: dict[str, float] = {}

    def descend(node: HierarchyNode, product: float) -> None:
        for child in node.children:
            assert child.weight is not None
            p = product * child.weight
            totals[child.bucket] = totals.get(child.bucket, 0.0) + p
            descend(child, p)

    descend(tree.root, 1.0)
    totals.pop(tree.root.bucket, None)
    return totals


def correlate(network_scores: dict[str, float], ground_truth: dict[str, float]) -> float:
    """Pearson correlation over the keys both maps share."""
    shared = sorted(set(network_scores) & set(ground_truth))
    if len(shared) < 3:
        raise InsufficientData(f"need >= 3 shared keys, got {len(shared)}")
    xs = [network_scores[k] for k in shared]
    ys = [ground_truth[k] for k in shared]
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise ConstantSeries("correlation undefined for a constant series")
    return statistics.correlation(xs, ys)


# --- exports -----------------------------------------------------------

def hierarchy_json(tree: HierarchyTree) -> str:
    """Nested JSON of the hierarchy carrying raw and normalized weights."""
    weights = tree.edge_weights()
    peak = max(weights) if weights else None

    def node_dict(node: HierarchyNode) -> dict:
        return {
            "bucket": node.bucket,
            "weight": node.weight,
            "normalized_weight": (
                None if node.weight is None or peak is None else node.weight / peak
            ),
            "children": [node_dict(child) for child in node.children],
        }

    payload = {
        "depth_limit": tree.depth_limit,
        "branch_limit": tree.branch_limit,
        "min_weight": tree.min_weight,
        "root": node_dict(tree.root),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def relationship_csv(
    network_scores: dict[str, float], ground_truth: dict[str, float]
) -> str:
    """CSV of (bucket, relationship_weight, ground_truth) over shared keys."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["bucket", "relationship_weight", "ground_truth"])
    for bucket in sorted(set(network_scores) & set(ground_truth)):
        writer.writerow([bucket, repr(network_scores[bucket]), repr(ground_truth[bucket])])
    return out.getvalue()
