"""In-memory weighted directed graph over bucket ids.

The graph is the shared substrate of the whole system: navigation events
reinforce its edges, analytics read it, and the bucket store persists it.
Weights only ever grow; there is no decay or deletion. All mutation is
expected to be serialized by one owning driver (see the service module);
the graph itself carries no locks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator

from .errors import InvalidBucketId, NonPositiveDelta, SelfLink, UnknownBucket

# Ids must be safe to embed in a URL path segment without escaping.
_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]+$")


def validate_bucket_id(bucket_id: str) -> str:
    """Return the id unchanged, or raise InvalidBucketId."""
    if not isinstance(bucket_id, str) or not _ID_PATTERN.match(bucket_id):
        raise InvalidBucketId(f"invalid bucket id: {bucket_id!r}")
    return bucket_id


@dataclass(frozen=True)
class Link:
    """A directed weighted edge between two buckets."""

    source: str
    target: str
    weight: float


class LinkGraph:
    """Weighted directed graph with create-or-accumulate edge semantics.

    Edges are unique per ordered (source, target) pair, self-links are
    rejected, and every reinforcement strictly increases the cached total
    weight by its delta.
    """

    def __init__(self) -> None:
        self._out: dict[str, dict[str, float]] = {}
        self._in: dict[str, dict[str, float]] = {}
        self._edge_count = 0
        self._total_weight = 0.0

    # --- nodes ---------------------------------------------------------

    def add_node(self, bucket_id: str) -> None:
        """Register a bucket. Idempotent."""
        validate_bucket_id(bucket_id)
        if bucket_id not in self._out:
            self._out[bucket_id] = {}
            self._in[bucket_id] = {}

    def has_node(self, bucket_id: str) -> bool:
        return bucket_id in self._out

    @property
    def nodes(self) -> list[str]:
        """All bucket ids, sorted for deterministic iteration."""
        return sorted(self._out)

    @property
    def node_count(self) -> int:
        return len(self._out)

    # --- edges ---------------------------------------------------------

    def reinforce(self, source: str, target: str, delta: float) -> float:
        """Add delta to the edge weight, creating the edge if absent.

        Returns the resulting weight. The created edge starts at exactly
        delta; there is no implicit base weight.
        """
        if source == target:
            raise SelfLink(f"self-link forbidden: {source}")
        if source not in self._out:
            raise UnknownBucket(f"unknown source bucket: {source}")
        if target not in self._out:
            raise UnknownBucket(f"unknown target bucket: {target}")
        if not delta > 0:
            raise NonPositiveDelta(f"delta must be > 0, got {delta}")
        row = self._out[source]
        if target in row:
            new_weight = row[target] + delta
        else:
            new_weight = delta
            self._edge_count += 1
        row[target] = new_weight
        self._in[target][source] = new_weight
        self._total_weight += delta
        return new_weight

    def add_link(self, source: str, target: str, weight: float) -> None:
        """Create an edge at exactly this weight. Loader/bootstrap path:
        the edge must not already exist. Reinforcement goes through
        reinforce()."""
        if source == target:
            raise SelfLink(f"self-link forbidden: {source}")
        if source not in self._out:
            raise UnknownBucket(f"unknown source bucket: {source}")
        if target not in self._out:
            raise UnknownBucket(f"unknown target bucket: {target}")
        if weight < 0:
            raise NonPositiveDelta(f"weight must be >= 0, got {weight}")
        if target in self._out[source]:
            raise ValueError(f"edge {source}->{target} already exists")
        self._out[source][target] = weight
        self._in[target][source] = weight
        self._edge_count += 1
        self._total_weight += weight

    def _withdraw(self, source: str, target: str, delta: float, created: bool) -> None:
        """Reverse one reinforce call. Engine-internal, for rollback on
        persistence failure only; not part of the public contract."""
        row = self._out[source]
        if created:
            del row[target]
            del self._in[target][source]
            self._edge_count -= 1
        else:
            row[target] -= delta
            self._in[target][source] = row[target]
        self._total_weight -= delta

    def has_edge(self, source: str, target: str) -> bool:
        return source in self._out and target in self._out[source]

    def weight(self, source: str, target: str) -> float:
        """Weight of an existing edge; 0.0 if the edge is absent."""
        return self._out.get(source, {}).get(target, 0.0)

    def edges(self) -> Iterator[Link]:
        """All edges in deterministic (source, target) order."""
        for source in sorted(self._out):
            row = self._out[source]
            for target in sorted(row):
                yield Link(source, target, row[target])

    @property
    def edge_count(self) -> int:
        return self._edge_count

    # --- views ---------------------------------------------------------

    def ranked_links(self, source: str) -> list[tuple[str, float]]:
        """Outgoing links sorted by weight descending, ties by target id."""
        if source not in self._out:
            raise UnknownBucket(f"unknown bucket: {source}")
        row = self._out[source]
        return sorted(row.items(), key=lambda item: (-item[1], item[0]))

    def out_links(self, source: str) -> dict[str, float]:
        if source not in self._out:
            raise UnknownBucket(f"unknown bucket: {source}")
        return dict(self._out[source])

    def in_links(self, target: str) -> dict[str, float]:
        if target not in self._in:
            raise UnknownBucket(f"unknown bucket: {target}")
        return dict(self._in[target])

    def total_weight(self) -> float:
        """Cached sum of all edge weights."""
        return self._total_weight

    def recomputed_total_weight(self) -> float:
        """Exact sum over all edges, for consistency checks against the cache."""
        return math.fsum(w for row in self._out.values() for w in row.values())

    def copy(self) -> "LinkGraph":
        """Independent snapshot; safe to hand to concurrent readers."""
        clone = LinkGraph()
        clone._out = {s: dict(row) for s, row in self._out.items()}
        clone._in = {t: dict(row) for t, row in self._in.items()}
        clone._edge_count = self._edge_count
        clone._total_weight = self._total_weight
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinkGraph):
            return NotImplemented
        return self._out == other._out

    def __repr__(self) -> str:
        return (
            f"LinkGraph(nodes={self.node_count}, edges={self._edge_count}, "
            f"total_weight={self._total_weight:.3f})"
        )
