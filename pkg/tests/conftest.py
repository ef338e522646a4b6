"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random

import pytest

from bucketnet.graph import LinkGraph
from bucketnet.reinforcement import (
    ReinforcementConfig,
    SessionState,
    TraversalEvent,
    WeightLedger,
    apply_event,
)


@pytest.fixture
def config() -> ReinforcementConfig:
    return ReinforcementConfig()


def make_graph(*node_ids: str) -> LinkGraph:
    graph = LinkGraph()
    for node_id in node_ids:
        graph.add_node(node_id)
    return graph


def replay(
    hops: list[tuple[str | None, str]],
    graph: LinkGraph | None = None,
    session_id: str = "s",
    config: ReinforcementConfig | None = None,
    ledger: WeightLedger | None = None,
):
    """Drive a hop list ((origin, destination), origin None = entry)
    through the engine on a graph that gets the needed nodes implicitly."""
    config = config or ReinforcementConfig()
    if graph is None:
        graph = LinkGraph()
        for origin, destination in hops:
            if origin is not None:
                graph.add_node(origin)
            graph.add_node(destination)
    session = SessionState(session_id=session_id)
    records = []
    for at, (origin, destination) in enumerate(hops):
        event = TraversalEvent(
            session_id=session_id, origin=origin, destination=destination, at=float(at)
        )
        records.extend(apply_event(event, session, graph, config, ledger))
    return graph, session, records


def random_graph(
    rng: random.Random, max_nodes: int = 20, max_edges: int = 80
) -> LinkGraph:
    """Arbitrary weighted digraph for oracle comparisons."""
    n = rng.randint(1, max_nodes)
    ids = [f"n{i:02d}" for i in range(n)]
    graph = LinkGraph()
    for node_id in ids:
        graph.add_node(node_id)
    if n < 2:
        return graph
    target_edges = rng.randint(0, min(max_edges, n * (n - 1)))
    added = 0
    attempts = 0
    while added < target_edges and attempts < target_edges * 10:
        attempts += 1
        s, t = rng.sample(ids, 2)
        if graph.has_edge(s, t):
            continue
        graph.add_link(s, t, round(rng.uniform(0.1, 5.0), 3))
        added += 1
    return graph
