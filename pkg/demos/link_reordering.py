"""How a bucket's link list reorders itself under traffic.

Each bucket starts with three random links at weight 0.5, shown in rank
order. Users navigating through a bucket create new links above the random
ones and bury the ones nobody follows.
"""

import random

from bucketnet import (
    AffinityModel,
    ReinforcementConfig,
    UserProfile,
    WeightLedger,
    init_network,
    run_session,
)

graph = init_network(30, 3, 0.5, seed=42)
portal = graph.nodes[0]
model = AffinityModel(graph.nodes, portal, seed=42, genre_size=6)

watched = graph.ranked_links(portal)[0][0]  # the portal's first random link


def show(bucket: str, heading: str) -> None:
    print(heading)
    for target, weight in graph.ranked_links(bucket):
        print(f"    {target}  ({weight:.1f})")


show(watched, f"links of {watched} before any traffic:")

ledger = WeightLedger(initial_weight=graph.total_weight())
config = ReinforcementConfig()
for i in range(40):
    user = UserProfile(adherence=0.8, mean_session_length=8.0, seed=i)
    run_session(user, model, graph, config, ledger,
                f"s{i}", random.Random(f"demo:{i}"), start_at=i * 100.0)

show(watched, f"\nlinks of {watched} after {ledger.hop_count} hops of traffic:")
print("\nNew links were created by reverse and shortcut reinforcement;")
print("random links that nobody followed sank to the bottom at 0.5.")
