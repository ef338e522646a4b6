"""Driving a live service over HTTP instead of the in-process engine.

Smoke-test mode for the simulator: the same users, seeds and choice rules,
but every hop is a real traversal request against a running service, and
the evaluation reads the service's analytics endpoints. Against a network
initialized with the same seed and shape, the run reproduces the
in-process simulation's weights exactly (timestamps aside), because the
displayed link order and the RNG draw sequence are identical.
"""

from __future__ import annotations

import csv
import io
import json
import random
import urllib.parse
import urllib.request

from .errors import InsufficientData
from .hierarchy import correlate
from .reinforcement import WeightLedger
from .simulation import (
    AffinityModel,
    SimulationReport,
    SimulationSettings,
    UserProfile,
    _geometric_length,
)

from scipy.stats import spearmanr


def _get(base: str, path: str) -> bytes:
    with urllib.request.urlopen(base + path, timeout=30) as response:
        return response.read()


def _get_json(base: str, path: str) -> dict:
    return json.loads(_get(base, path).decode("utf-8"))


def list_buckets(base: str) -> list[str]:
    """All bucket ids, read from the full centrality rankings."""
    text = _get(base, "/_analytics/centrality?metric=degree").decode("utf-8")
    rows = list(csv.DictReader(io.StringIO(text)))
    return sorted(row["bucket"] for row in rows)


def total_weight(base: str) -> float:
    """Sum of all link weights, via the handshake identity."""
    text = _get(base, "/_analytics/centrality?metric=weighted").decode("utf-8")
    rows = list(csv.DictReader(io.StringIO(text)))
    return sum(float(row["weighted_degree"]) for row in rows) / 2.0


def top_weighted_bucket(base: str) -> str:
    text = _get(base, "/_analytics/centrality?metric=weighted&k=1").decode("utf-8")
    rows = list(csv.DictReader(io.StringIO(text)))
    return rows[0]["bucket"]


def hierarchy_scores(
    base: str, root: str, depth: int, branch: int, min_weight: float
) -> dict[str, float]:
    """Relationship weights computed from the exported hierarchy JSON."""
    payload = _get_json(
        base,
        f"/_analytics/hierarchy?root={root}&depth={depth}"
        f"&branch={branch}&min_weight={min_weight}",
    )
    totals: dict[str, float] = {}

    def descend(node: dict, product: float) -> None:
        for child in node["children"]:
            p = product * child["normalized_weight"]
            totals[child["bucket"]] = totals.get(child["bucket"], 0.0) + p
            descend(child, p)

    descend(payload["root"], 1.0)
    totals.pop(root, None)
    return totals


def run_http_session(
    base: str,
    user: UserProfile,
    model: AffinityModel,
    session_token: str,
    rng: random.Random,
) -> int:
    """One browsing session over the wire; returns the hop count."""
    payload = _get_json(
        base, f"/{model.portal}?format=json&session={session_token}"
    )
    hops = 0
    length = _geometric_length(rng, user.mean_session_length)
    current = model.portal
    for _ in range(length):
        links = payload["links"]
        if not links:
            break
        candidates = [link["target"] for link in links]
        if rng.random() < user.adherence:
            weights = [model.affinity(current, target) for target in candidates]
            if sum(weights) > 0:
                index = rng.choices(range(len(candidates)), weights=weights, k=1)[0]
            else:
                index = rng.randrange(len(candidates))
        else:
            index = rng.randrange(len(candidates))
        chosen = links[index]
        url = chosen["url"]
        url += "&format=json" if "?" in url else "?format=json"
        payload = json.loads(_get(base, url).decode("utf-8"))
        current = chosen["target"]
        hops += 1
    return hops


def run_http_experiment(settings: SimulationSettings, base: str) -> SimulationReport:
    """The simulated experiment, every hop a live HTTP traversal.

    The service must host a network with the same shape and seed as the
    settings (bucketnet init with matching parameters) for weight-level
    parity with the in-process run. The returned ledger's transitive_hops
    stays 0: that count lives server-side only.
    """
    if settings.users < 1:
        raise InsufficientData("at least one simulated user is required")
    buckets = list_buckets(base)
    if not buckets:
        raise InsufficientData("service hosts no buckets")
    portal = settings.portal or buckets[0]
    model = AffinityModel(
        buckets, portal, seed=settings.seed, genre_size=settings.genre_size
    )
    initial = total_weight(base)

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
    while True:
        if settings.sessions is not None and sessions >= settings.sessions:
            break
        if settings.sessions is None and settings.hops_target is not None:
            if hops >= settings.hops_target:
                break
        user_index = sessions % settings.users
        hops += run_http_session(
            base,
            profiles[user_index],
            model,
            session_token=f"u{user_index:02d}s{sessions:05d}",
            rng=rngs[user_index],
        )
        sessions += 1

    learned = total_weight(base) - initial
    ledger = WeightLedger(
        initial_weight=initial, learned_weight=learned, hop_count=hops
    )
    scores = hierarchy_scores(
        base, portal, settings.depth_limit, settings.branch_limit, settings.min_weight
    )
    if len(scores) == 0:
        raise InsufficientData("hierarchy is empty; not enough traversals yet")
    truth = {bucket: model.affinity(portal, bucket) for bucket in scores}
    pearson = correlate(scores, truth)
    shared = sorted(scores)
    rho = float(spearmanr([scores[b] for b in shared], [truth[b] for b in shared])[0])

    ranked_csv = _get(
        base, f"/_analytics/centrality?metric=weighted&k={settings.top_k + 1}"
    ).decode("utf-8")
    ranked = [
        row["bucket"]
        for row in csv.DictReader(io.StringIO(ranked_csv))
        if row["bucket"] != portal
    ][: settings.top_k]
    overlap = len(set(ranked) & set(model.most_affine(settings.top_k))) / settings.top_k

    return SimulationReport(
        sessions=sessions,
        hops=hops,
        ledger=ledger,
        pearson=pearson,
        spearman=rho,
        top_k_overlap=overlap,
        hierarchy_buckets=len(scores),
        portal=portal,
        top_weighted=top_weighted_bucket(base),
    )
