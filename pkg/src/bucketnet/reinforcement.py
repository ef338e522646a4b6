"""Navigation-driven link reinforcement.

Each user hop strengthens the traversed link, the reverse link, and (when
the session remembers the bucket before the previous one) the shortcut from
that bucket to the new destination. The three amounts default to 1.0, 0.5
and 0.3. Per-session memory of the last two displayed buckets is what makes
the shortcut rule possible; sessions are tracked server-side with an idle
ttl.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import SelfHop, SessionMismatch, UnknownBucket
from .graph import LinkGraph

RULE_FREQUENCY = "frequency"
RULE_SYMMETRY = "symmetry"
RULE_TRANSITIVITY = "transitivity"

DEFAULT_SESSION_TTL = 1800.0


@dataclass(frozen=True)
class ReinforcementConfig:
    """The three reinforcement amounts applied per hop."""

    frequency: float = 1.0
    symmetry: float = 0.5
    transitivity: float = 0.3

    def __post_init__(self) -> None:
        for name in ("frequency", "symmetry", "transitivity"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def per_hop_min(self) -> float:
        """Weight added by a hop without the transitive shortcut."""
        return self.frequency + self.symmetry

    @property
    def per_hop_max(self) -> float:
        """Weight added by a hop that also triggers the shortcut."""
        return self.frequency + self.symmetry + self.transitivity


@dataclass
class SessionState:
    """Two-bucket memory of one user's navigation.

    previous is the bucket last displayed; pre_previous the one before
    that. pre_previous is only ever set when previous is.
    """

    session_id: str
    previous: str | None = None
    pre_previous: str | None = None
    last_activity: float = 0.0


@dataclass(frozen=True)
class TraversalEvent:
    """One user hop. origin is None for the session-opening entry."""

    session_id: str
    origin: str | None
    destination: str
    at: float = 0.0


@dataclass(frozen=True)
class ReinforcementRecord:
    """One applied weight increment, for audit logs and replay checks."""

    at: float
    session_id: str
    source: str
    target: str
    delta: float
    rule: str
    created: bool = False

    def audit_line(self) -> str:
        """Fixed tab-separated field order: timestamp, session, source,
        target, delta, rule."""
        stamp = datetime.fromtimestamp(self.at, tz=timezone.utc).isoformat()
        return f"{stamp}\t{self.session_id}\t{self.source}\t{self.target}\t{self.delta}\t{self.rule}"


@dataclass
class WeightLedger:
    """Running account of learned weight against hop counts.

    learned_weight sums every delta applied after initial_weight was
    snapshotted; with default amounts learned_weight / hop_count always
    falls in [1.5, 1.8]. Accumulation is compensated so the sum stays
    exact to a few ulps over arbitrarily long runs.
    """

    initial_weight: float = 0.0
    learned_weight: float = 0.0
    hop_count: int = 0
    transitive_hops: int = 0
    _compensation: float = field(default=0.0, repr=False, compare=False)

    def add(self, delta: float) -> None:
        y = delta - self._compensation
        t = self.learned_weight + y
        self._compensation = (t - self.learned_weight) - y
        self.learned_weight = t


def apply_event(
    event: TraversalEvent,
    session: SessionState,
    graph: LinkGraph,
    config: ReinforcementConfig,
    ledger: WeightLedger | None = None,
) -> list[ReinforcementRecord]:
    """Apply one traversal event to the graph and session, atomically.

    Session-opening entries (origin is None) apply no reinforcement and
    just seed the session memory. A hop applies the traversed-link and
    reverse-link increments, plus the shortcut increment from the
    remembered pre-previous bucket when that bucket differs from the
    destination (equality would mean a self-link, which never exists).

    Returns the applied records in application order. All endpoints are
    validated before the first increment lands, so a raised error leaves
    graph and session untouched.
    """
    if event.session_id != session.session_id:
        raise SessionMismatch(
            f"event session {event.session_id!r} != state session {session.session_id!r}"
        )
    if not graph.has_node(event.destination):
        raise UnknownBucket(f"unknown destination bucket: {event.destination}")

    if event.origin is None:
        session.previous = event.destination
        session.pre_previous = None
        session.last_activity = event.at
        return []

    if event.origin == event.destination:
        raise SelfHop(f"origin equals destination: {event.origin}")
    if not graph.has_node(event.origin):
        raise UnknownBucket(f"unknown origin bucket: {event.origin}")

    pre_previous = session.pre_previous
    apply_shortcut = pre_previous is not None and pre_previous != event.destination

    records: list[ReinforcementRecord] = []

    def _reinforce(source: str, target: str, delta: float, rule: str) -> None:
        created = not graph.has_edge(source, target)
        graph.reinforce(source, target, delta)
        records.append(
            ReinforcementRecord(
                at=event.at,
                session_id=event.session_id,
                source=source,
                target=target,
                delta=delta,
                rule=rule,
                created=created,
            )
        )

    _reinforce(event.origin, event.destination, config.frequency, RULE_FREQUENCY)
    _reinforce(event.destination, event.origin, config.symmetry, RULE_SYMMETRY)
    if apply_shortcut:
        assert pre_previous is not None
        _reinforce(pre_previous, event.destination, config.transitivity, RULE_TRANSITIVITY)

    session.pre_previous = event.origin
    session.previous = event.destination
    session.last_activity = event.at

    if ledger is not None:
        ledger.hop_count += 1
        for record in records:
            ledger.add(record.delta)
        if apply_shortcut:
            ledger.transitive_hops += 1
    return records


def rollback(graph: LinkGraph, records: list[ReinforcementRecord]) -> None:
    """Undo the increments of one event, newest first.

    Only for the persistence-failure path: an event either lands fully in
    graph and store, or not at all.
    """
    for record in reversed(records):
        graph._withdraw(record.source, record.target, record.delta, record.created)


class SessionRegistry:
    """Server-side session table keyed by session id, with an idle ttl.

    A session idle longer than the ttl is discarded; the user's next hop
    then starts from empty memory and gets no shortcut reinforcement.
    """

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL) -> None:
        if not ttl > 0:
            raise ValueError("ttl must be > 0")
        self.ttl = ttl
        self._sessions: dict[str, SessionState] = {}

    def session_for(self, session_id: str, now: float) -> SessionState:
        """Return the live session for the id, or a fresh one."""
        state = self._sessions.get(session_id)
        if state is None or now - state.last_activity > self.ttl:
            state = SessionState(session_id=session_id, last_activity=now)
            self._sessions[session_id] = state
        return state

    def prune(self, now: float) -> int:
        """Drop expired sessions; returns how many were removed."""
        expired = [
            sid for sid, s in self._sessions.items() if now - s.last_activity > self.ttl
        ]
        for sid in expired:
            del self._sessions[sid]
        return len(expired)

    def __len__(self) -> int:
        return len(self._sessions)


def estimate_traversals(
    ledger: WeightLedger,
    config: ReinforcementConfig,
    transitive_fraction: float = 1.0,
) -> int:
    """Estimate direct traversals from accumulated weight alone.

    Divides learned weight by the per-hop amount, assuming the given
    fraction of hops triggered the shortcut rule (1.0 by default, giving a
    divisor of 1.8 with default amounts). The ledger's hop_count is the
    exact figure when available; this mirrors the estimate one can make
    from weight totals only.
    """
    divisor = config.frequency + config.symmetry + config.transitivity * transitive_fraction
    if ledger.learned_weight == 0:
        return 0
    return round(ledger.learned_weight / divisor)
