"""Synthetic navigation over an initialized network.

Ground-truth relatedness between buckets is planted as clusters ("genres"):
high affinity inside a genre, low across genres. Simulated users enter at
the portal and, at each displayed bucket, pick the next hop among the
displayed links - proportionally to affinity with probability `adherence`,
uniformly otherwise. Every hop runs through the reinforcement engine, so
the link structure the users see is the one their own traffic is training.

Evaluation extracts the portal hierarchy, computes path-product
relationship weights, and correlates them against the planted affinities -
the machine analog of comparing the learned structure to expert judgment.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from scipy.stats import spearmanr

from .centrality import METRIC_WEIGHTED, top_k
from .errors import InsufficientData, InvalidParameters
from .graph import LinkGraph
from .hierarchy import (
    DEFAULT_BRANCH_LIMIT,
    DEFAULT_DEPTH_LIMIT,
    DEFAULT_MIN_WEIGHT,
    all_relationship_weights,
    correlate,
    extract_hierarchy,
    normalize_weights,
)
from .reinforcement import (
    ReinforcementConfig,
    ReinforcementRecord,
    SessionState,
    TraversalEvent,
    WeightLedger,
    apply_event,
)
from .store import BucketRecord, BucketStore, link_element

DEFAULT_GENRE_SIZE = 10
DEFAULT_INTRA_RANGE = (0.5, 1.0)
DEFAULT_INTER_RANGE = (0.0, 0.1)
DEFAULT_TOP_K = 8


def bucket_ids(n: int) -> list[str]:
    width = max(3, len(str(max(n - 1, 0))))
    return [f"b{i:0{width}d}" for i in range(n)]


def init_network(
    n: int,
    links_per_bucket: int = 3,
    initial_weight: float = 0.5,
    seed: int = 0,
    store: BucketStore | None = None,
) -> LinkGraph:
    """Fresh network: n buckets, each with links_per_bucket distinct random
    non-self out-links at initial_weight. Deterministic under seed. When a
    store is given the bucket files are written as well."""
    if links_per_bucket < 1 or n <= links_per_bucket:
        raise InvalidParameters(
            f"need n > links_per_bucket >= 1, got n={n} links_per_bucket={links_per_bucket}"
        )
    if not initial_weight > 0:
        raise InvalidParameters("initial_weight must be > 0")

    ids = bucket_ids(n)
    rng = random.Random(f"network:{seed}")
    graph = LinkGraph()
    for bucket_id in ids:
        graph.add_node(bucket_id)
    targets_by_source: dict[str, list[str]] = {}
    for bucket_id in ids:
        others = [b for b in ids if b != bucket_id]
        targets = sorted(rng.sample(others, links_per_bucket))
        targets_by_source[bucket_id] = targets
        for target in targets:
            graph.add_link(bucket_id, target, initial_weight)

    if store is not None:
        store.ensure_dirs()
        for i, bucket_id in enumerate(ids):
            record = BucketRecord(
                bucket_id=bucket_id,
                title=f"Bucket {bucket_id}",
                metadata=[("about", f"Generated content for {bucket_id} (#{i}).")],
                elements=[
                    link_element(bucket_id, target, initial_weight, f"Bucket {target}")
                    for target in targets_by_source[bucket_id]
                ],
            )
            store.save(record)
    return graph


class AffinityModel:
    """Planted-cluster ground truth for bucket relatedness.

    Buckets are partitioned into genres; ordered-pair affinities are drawn
    uniformly from the intra range inside a genre and the inter range
    across genres. Asymmetric by construction and regenerated exactly from
    the seed.
    """

    def __init__(
        self,
        node_ids: list[str],
        portal: str,
        seed: int = 0,
        genre_size: int = DEFAULT_GENRE_SIZE,
        intra_range: tuple[float, float] = DEFAULT_INTRA_RANGE,
        inter_range: tuple[float, float] = DEFAULT_INTER_RANGE,
    ) -> None:
        if portal not in node_ids:
            raise InvalidParameters(f"portal {portal!r} not among buckets")
        if genre_size < 1:
            raise InvalidParameters("genre_size must be >= 1")
        self.portal = portal
        self.seed = seed
        rng = random.Random(f"affinity:{seed}")
        ordered = sorted(node_ids)
        shuffled = ordered[:]
        rng.shuffle(shuffled)
        self.genre: dict[str, int] = {
            bucket: i // genre_size for i, bucket in enumerate(shuffled)
        }
        self._affinity: dict[tuple[str, str], float] = {}
        for a in ordered:
            for b in ordered:
                if a == b:
                    continue
                # The portal is everyone's point of return: affinity toward
                # it is drawn from the intra range regardless of genre.
                if self.genre[a] == self.genre[b] or b == portal:
                    lo, hi = intra_range
                else:
                    lo, hi = inter_range
                self._affinity[(a, b)] = rng.uniform(lo, hi)

    def affinity(self, a: str, b: str) -> float:
        return self._affinity[(a, b)]

    def ground_truth(self) -> dict[str, float]:
        """Affinity of every bucket to the portal, from the portal's side."""
        return {
            b: v for (a, b), v in self._affinity.items() if a == self.portal
        }

    def most_affine(self, k: int) -> list[str]:
        truth = self.ground_truth()
        ranked = sorted(truth.items(), key=lambda kv: (-kv[1], kv[0]))
        return [bucket for bucket, _ in ranked[:k]]


@dataclass(frozen=True)
class UserProfile:
    """How a simulated user picks links and how long they browse."""

    adherence: float = 0.8
    mean_session_length: float = 8.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.adherence <= 1.0:
            raise InvalidParameters("adherence must be in [0, 1]")
        if self.mean_session_length < 1:
            raise InvalidParameters("mean session length must be >= 1")


def _geometric_length(rng: random.Random, mean: float) -> int:
    # Support {1, 2, ...} with the given mean.
    p = 1.0 / mean
    if p >= 1.0:
        return 1
    u = rng.random()
    return 1 + int(math.log(1.0 - u) / math.log(1.0 - p))


def run_session(
    user: UserProfile,
    model: AffinityModel,
    graph: LinkGraph,
    config: ReinforcementConfig,
    ledger: WeightLedger,
    session_id: str,
    rng: random.Random,
    start_at: float = 0.0,
    sink: "list[ReinforcementRecord] | None" = None,
) -> list[TraversalEvent]:
    """One portal-entered session, every event applied through the engine.

    Returns the emitted events; applied reinforcement records append to
    sink when given. The caller's rng drives all choices, so a fixed seed
    reproduces the session exactly.
    """
    session = SessionState(session_id=session_id)
    at = start_at
    events: list[TraversalEvent] = []

    def emit(origin: str | None, destination: str) -> None:
        nonlocal at
        event = TraversalEvent(
            session_id=session_id, origin=origin, destination=destination, at=at
        )
        records = apply_event(event, session, graph, config, ledger)
        if sink is not None:
            sink.extend(records)
        events.append(event)
        at += 1.0

    emit(None, model.portal)
    current = model.portal
    hops = _geometric_length(rng, user.mean_session_length)
    for _ in range(hops):
        candidates = [target for target, _ in graph.ranked_links(current)]
        if not candidates:
            break
        if rng.random() < user.adherence:
            weights = [model.affinity(current, target) for target in candidates]
            if sum(weights) > 0:
                choice = rng.choices(candidates, weights=weights, k=1)[0]
            else:
                choice = candidates[rng.randrange(len(candidates))]
        else:
            choice = candidates[rng.randrange(len(candidates))]
        emit(current, choice)
        current = choice
    return events


@dataclass
class SimulationReport:
    """Outcome of one simulated experiment."""

    sessions: int
    hops: int
    ledger: WeightLedger
    pearson: float
    spearman: float
    top_k_overlap: float
    hierarchy_buckets: int = 0
    portal: str = ""
    top_weighted: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "sessions": self.sessions,
                "hops": self.hops,
                "ledger": {
                    "initial_weight": self.ledger.initial_weight,
                    "learned_weight": self.ledger.learned_weight,
                    "hop_count": self.ledger.hop_count,
                    "transitive_hops": self.ledger.transitive_hops,
                },
                "pearson": self.pearson,
                "spearman": self.spearman,
                "top_k_overlap": self.top_k_overlap,
                "hierarchy_buckets": self.hierarchy_buckets,
                "portal": self.portal,
                "top_weighted": self.top_weighted,
            },
            sort_keys=True,
        )


def evaluation_pairs(
    graph: LinkGraph,
    model: AffinityModel,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    branch_limit: int = DEFAULT_BRANCH_LIMIT,
    min_weight: float = DEFAULT_MIN_WEIGHT,
) -> tuple[dict[str, float], dict[str, float]]:
    """Relationship weights from the portal hierarchy, paired with the
    planted affinities for the same buckets."""
    tree = extract_hierarchy(
        graph, model.portal, depth_limit=depth_limit,
        branch_limit=branch_limit, min_weight=min_weight,
    )
    if tree.edge_count == 0:
        raise InsufficientData("hierarchy is empty; not enough traversals yet")
    scores = all_relationship_weights(normalize_weights(tree))
    truth = {bucket: model.affinity(model.portal, bucket) for bucket in scores}
    return scores, truth


def evaluate(
    graph: LinkGraph,
    model: AffinityModel,
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
    branch_limit: int = DEFAULT_BRANCH_LIMIT,
    min_weight: float = DEFAULT_MIN_WEIGHT,
    k: int = DEFAULT_TOP_K,
) -> dict[str, float]:
    """Score the emergent structure against the planted ground truth.

    Relationship weights from the portal hierarchy are correlated against
    the portal's affinities (Pearson, with Spearman as a robustness
    check); top-k weighted-degree buckets are compared against the k most
    affine ones.
    """
    scores, truth = evaluation_pairs(
        graph, model, depth_limit=depth_limit,
        branch_limit=branch_limit, min_weight=min_weight,
    )
    pearson = correlate(scores, truth)
    shared = sorted(scores)
    rho = float(spearmanr([scores[b] for b in shared], [truth[b] for b in shared])[0])

    ranked = [
        s.bucket
        for s in top_k(graph, k + 1, METRIC_WEIGHTED)
        if s.bucket != model.portal
    ][:k]
    affine = set(model.most_affine(k))
    overlap = len(affine & set(ranked)) / k if k else 0.0
    return {
        "pearson": pearson,
        "spearman": rho,
        "top_k_overlap": overlap,
        "hierarchy_buckets": float(len(scores)),
    }


@dataclass
class SimulationSettings:
    """Everything a simulated experiment needs, seeds included."""

    buckets: int = 150
    links_per_bucket: int = 3
    initial_weight: float = 0.5
    users: int = 15
    adherence: float = 0.8
    mean_session_length: float = 8.0
    sessions: int | None = None
    hops_target: int | None = 1000
    seed: int = 0
    portal: str | None = None
    genre_size: int = DEFAULT_GENRE_SIZE
    frequency: float = 1.0
    symmetry: float = 0.5
    transitivity: float = 0.3
    depth_limit: int = DEFAULT_DEPTH_LIMIT
    branch_limit: int = DEFAULT_BRANCH_LIMIT
    min_weight: float = DEFAULT_MIN_WEIGHT
    top_k: int = DEFAULT_TOP_K

    def config(self) -> ReinforcementConfig:
        return ReinforcementConfig(
            frequency=self.frequency,
            symmetry=self.symmetry,
            transitivity=self.transitivity,
        )


def run_simulation(
    settings: SimulationSettings,
    graph: LinkGraph | None = None,
    sink: "list[ReinforcementRecord] | None" = None,
) -> SimulationReport:
    """Run the full experiment: init (unless a graph is supplied), browse,
    evaluate. Bit-for-bit deterministic under the settings' seeds."""
    report, _, _ = run_experiment(settings, graph=graph, sink=sink)
    return report


def run_experiment(
    settings: SimulationSettings,
    graph: LinkGraph | None = None,
    sink: "list[ReinforcementRecord] | None" = None,
) -> tuple[SimulationReport, LinkGraph, AffinityModel]:
    """run_simulation, but also returning the trained graph and the
    ground-truth model for further analysis or export."""
    if settings.users < 1:
        raise InsufficientData("at least one simulated user is required")
    if settings.sessions is None and settings.hops_target is None:
        raise InvalidParameters("either sessions or hops_target must be set")

    if graph is None:
        graph = init_network(
            settings.buckets,
            settings.links_per_bucket,
            settings.initial_weight,
            seed=settings.seed,
        )
    portal = settings.portal or graph.nodes[0]
    model = AffinityModel(
        graph.nodes, portal, seed=settings.seed, genre_size=settings.genre_size
    )
    config = settings.config()
    ledger = WeightLedger(initial_weight=graph.total_weight())

    profiles = [
        UserProfile(
            adherence=settings.adherence,
            mean_session_length=settings.mean_session_length,
            seed=settings.seed * 10_000 + i,
        )
        for i in range(settings.users)
    ]
    rngs = [random.Random(f"user:{p.seed}") for p in profiles]

    sessions = 0
    hops = 0
    at = 0.0
    while True:
        if settings.sessions is not None and sessions >= settings.sessions:
            break
        if settings.sessions is None and settings.hops_target is not None:
            if hops >= settings.hops_target:
                break
        user_index = sessions % settings.users
        events = run_session(
            profiles[user_index],
            model,
            graph,
            config,
            ledger,
            session_id=f"u{user_index:02d}s{sessions:05d}",
            rng=rngs[user_index],
            start_at=at,
            sink=sink,
        )
        sessions += 1
        hops += sum(1 for e in events if e.origin is not None)
        at += len(events)

    metrics = evaluate(
        graph,
        model,
        depth_limit=settings.depth_limit,
        branch_limit=settings.branch_limit,
        min_weight=settings.min_weight,
        k=settings.top_k,
    )
    report = SimulationReport(
        sessions=sessions,
        hops=hops,
        ledger=ledger,
        pearson=metrics["pearson"],
        spearman=metrics["spearman"],
        top_k_overlap=metrics["top_k_overlap"],
        hierarchy_buckets=int(metrics["hierarchy_buckets"]),
        portal=portal,
        top_weighted=top_k(graph, 1, METRIC_WEIGHTED)[0].bucket,
    )
    return report, graph, model
