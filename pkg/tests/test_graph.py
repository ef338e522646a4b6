"""Link graph: node/edge semantics, ranked views, weight accounting."""

from __future__ import annotations

import math
import random

import pytest

from bucketnet.errors import (
    InvalidBucketId,
    NonPositiveDelta,
    SelfLink,
    UnknownBucket,
)
from bucketnet.graph import LinkGraph

from conftest import make_graph


class TestNodes:
    def test_add_node_base_case(self):
        g = LinkGraph()
        g.add_node("b1")
        assert g.node_count == 1
        assert g.edge_count == 0

    def test_add_node_idempotent(self):
        g = LinkGraph()
        g.add_node("b1")
        g.add_node("b1")
        assert g.node_count == 1

    def test_150_generated_ids(self):
        g = LinkGraph()
        for i in range(150):
            g.add_node(f"b{i:03d}")
        assert g.node_count == 150

    @pytest.mark.parametrize("bad", ["", "a b", "a/b", "a?b", "ü", "x%20y"])
    def test_invalid_ids_rejected(self, bad):
        g = LinkGraph()
        with pytest.raises(InvalidBucketId):
            g.add_node(bad)

    def test_valid_id_charset(self):
        g = LinkGraph()
        g.add_node("AZaz09_-")
        assert g.has_node("AZaz09_-")


class TestReinforce:
    def test_creates_absent_edge_at_delta(self):
        g = make_graph("b1", "b2")
        assert g.reinforce("b1", "b2", 1.0) == 1.0
        assert g.weight("b1", "b2") == 1.0

    def test_accumulates(self):
        g = make_graph("b1", "b2")
        g.reinforce("b1", "b2", 0.5)
        assert g.reinforce("b1", "b2", 0.3) == pytest.approx(0.8, abs=1e-9)

    def test_self_link_rejected(self):
        g = make_graph("b1")
        with pytest.raises(SelfLink):
            g.reinforce("b1", "b1", 1.0)

    def test_unknown_endpoints_rejected(self):
        g = make_graph("b1")
        with pytest.raises(UnknownBucket):
            g.reinforce("b1", "nope", 1.0)
        with pytest.raises(UnknownBucket):
            g.reinforce("nope", "b1", 1.0)

    @pytest.mark.parametrize("delta", [0.0, -1.0])
    def test_non_positive_delta_rejected(self, delta):
        g = make_graph("b1", "b2")
        with pytest.raises(NonPositiveDelta):
            g.reinforce("b1", "b2", delta)

    def test_edge_count_changes_by_at_most_one(self):
        g = make_graph("a", "b", "c")
        before = g.edge_count
        g.reinforce("a", "b", 1.0)
        assert g.edge_count == before + 1
        g.reinforce("a", "b", 1.0)
        assert g.edge_count == before + 1


class TestRankedLinks:
    def test_sort_and_lexicographic_tie_break(self):
        g = make_graph("s", "a", "b", "c")
        g.add_link("s", "a", 0.5)
        g.add_link("s", "b", 1.5)
        g.add_link("s", "c", 0.5)
        assert g.ranked_links("s") == [("b", 1.5), ("a", 0.5), ("c", 0.5)]

    def test_reinforced_link_overtakes_initial_links(self):
        # A traversed link must list above untouched initial links.
        g = make_graph("clash", "r1", "r2", "hot")
        for t in ("r1", "r2", "hot"):
            g.add_link("clash", t, 0.5)
        g.reinforce("clash", "hot", 1.0)
        assert g.ranked_links("clash")[0] == ("hot", 1.5)

    def test_empty_outgoing_set(self):
        g = make_graph("lonely")
        assert g.ranked_links("lonely") == []

    def test_unknown_bucket(self):
        g = LinkGraph()
        with pytest.raises(UnknownBucket):
            g.ranked_links("ghost")

    def test_permutation_and_stability(self):
        rng = random.Random(7)
        g = make_graph("s", *[f"t{i}" for i in range(12)])
        for i in range(12):
            g.add_link("s", f"t{i}", round(rng.uniform(0.1, 3.0), 2))
        ranked = g.ranked_links("s")
        assert sorted(t for t, _ in ranked) == sorted(g.out_links("s"))
        assert ranked == g.ranked_links("s")


class TestTotalWeight:
    def test_empty_graph(self):
        assert LinkGraph().total_weight() == 0.0

    def test_initialization_arithmetic(self):
        # 150 buckets x 3 links x 0.5 each.
        g = LinkGraph()
        ids = [f"b{i:03d}" for i in range(150)]
        for b in ids:
            g.add_node(b)
        rng = random.Random(0)
        for b in ids:
            for t in rng.sample([x for x in ids if x != b], 3):
                g.add_link(b, t, 0.5)
        assert g.edge_count == 450
        assert g.total_weight() == pytest.approx(225.0, abs=1e-9)
        g.reinforce(ids[0], g.ranked_links(ids[0])[0][0], 1.0)
        assert g.total_weight() == pytest.approx(226.0, abs=1e-9)

    def test_cache_matches_recomputation(self):
        rng = random.Random(3)
        g = make_graph(*[f"n{i}" for i in range(10)])
        for _ in range(200):
            s, t = rng.sample(g.nodes, 2)
            g.reinforce(s, t, rng.choice([1.0, 0.5, 0.3]))
        assert g.total_weight() == pytest.approx(g.recomputed_total_weight(), abs=1e-9)


class TestInvariants:
    def test_weight_monotonicity_and_ledger_identity(self):
        rng = random.Random(11)
        g = make_graph(*[f"n{i}" for i in range(8)])
        initial = g.total_weight()
        applied = []
        snapshots = {}
        for _ in range(500):
            s, t = rng.sample(g.nodes, 2)
            before = g.weight(s, t)
            delta = rng.choice([1.0, 0.5, 0.3])
            after = g.reinforce(s, t, delta)
            assert after > before
            applied.append(delta)
            key = (s, t)
            assert g.weight(s, t) >= snapshots.get(key, 0.0)
            snapshots[key] = g.weight(s, t)
        assert g.total_weight() == pytest.approx(initial + math.fsum(applied), abs=1e-9)

    def test_edge_uniqueness(self):
        g = make_graph("a", "b")
        g.reinforce("a", "b", 1.0)
        g.reinforce("a", "b", 0.5)
        assert g.edge_count == 1
        assert len(list(g.edges())) == 1

    def test_copy_is_independent(self):
        g = make_graph("a", "b")
        g.reinforce("a", "b", 1.0)
        snap = g.copy()
        g.reinforce("a", "b", 1.0)
        assert snap.weight("a", "b") == 1.0
        assert g.weight("a", "b") == 2.0
        assert snap == snap.copy()
