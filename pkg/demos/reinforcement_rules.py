"""The three reinforcement rules, on the smallest possible network.

A user enters at b1, clicks through to b2, then on to b3. The traversed
link gains 1.0, the reverse link 0.5, and because b3 was reached from b1
via one intermediary, the shortcut b1->b3 appears at 0.3.
"""

from bucketnet import (
    LinkGraph,
    ReinforcementConfig,
    SessionState,
    TraversalEvent,
    WeightLedger,
    apply_event,
    estimate_traversals,
)

graph = LinkGraph()
for bucket in ("b1", "b2", "b3"):
    graph.add_node(bucket)

config = ReinforcementConfig()  # 1.0 / 0.5 / 0.3
session = SessionState(session_id="walkthrough")
ledger = WeightLedger()

hops = [(None, "b1"), ("b1", "b2"), ("b2", "b3")]
for at, (origin, destination) in enumerate(hops):
    event = TraversalEvent("walkthrough", origin, destination, float(at))
    records = apply_event(event, session, graph, config, ledger)
    label = f"{origin} -> {destination}" if origin else f"enter at {destination}"
    print(f"{label}:")
    for r in records:
        print(f"    {r.rule:<12} {r.source} -> {r.target}  +{r.delta}")
    if not records:
        print("    (no reinforcement; session memory seeded)")

print("\nresulting edges:")
for edge in graph.edges():
    print(f"    {edge.source} -> {edge.target}  weight {edge.weight}")

print(f"\nledger: {ledger.learned_weight} units over {ledger.hop_count} hops "
      f"({ledger.transitive_hops} with the shortcut)")
print("traversals estimated from weight alone:",
      estimate_traversals(ledger, config))
