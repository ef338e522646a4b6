"""bucketnet: self-organizing networks of linked buckets.

Buckets are self-contained objects holding content and a weighted list of
links to other buckets. User navigation reinforces the links (traversed
link, its reverse, and the two-hop shortcut), so the network reorganizes
around collective browsing behavior. The package bundles the graph and
reinforcement engine, XML persistence, centrality and path-weight
analytics, an HTTP service speaking the referer/redirect wire protocol,
and a deterministic navigation simulator.
"""

from . import errors
from .centrality import (
    CentralityScore,
    degree_centrality,
    rankings_csv,
    top_k,
    weighted_degree_centrality,
)
from .graph import Link, LinkGraph, validate_bucket_id
from .http_driver import run_http_experiment
from .hierarchy import (
    HierarchyNode,
    HierarchyTree,
    all_relationship_weights,
    correlate,
    extract_hierarchy,
    hierarchy_json,
    normalize_weights,
    relationship_csv,
    relationship_weight,
)
from .reinforcement import (
    ReinforcementConfig,
    ReinforcementRecord,
    SessionRegistry,
    SessionState,
    TraversalEvent,
    WeightLedger,
    apply_event,
    estimate_traversals,
)
from .service import (
    BucketService,
    DisplayPayload,
    MethodRequest,
    make_server,
    parse_method_request,
)
from .simulation import (
    AffinityModel,
    SimulationReport,
    SimulationSettings,
    UserProfile,
    evaluate,
    evaluation_pairs,
    init_network,
    run_experiment,
    run_session,
    run_simulation,
)
from .store import BucketRecord, BucketStore, Element, add_element, load_bucket, save_bucket

__version__ = "0.1.0"

__all__ = [
    "AffinityModel",
    "BucketRecord",
    "BucketService",
    "BucketStore",
    "CentralityScore",
    "DisplayPayload",
    "Element",
    "HierarchyNode",
    "HierarchyTree",
    "Link",
    "LinkGraph",
    "MethodRequest",
    "ReinforcementConfig",
    "ReinforcementRecord",
    "SessionRegistry",
    "SessionState",
    "SimulationReport",
    "SimulationSettings",
    "TraversalEvent",
    "UserProfile",
    "WeightLedger",
    "add_element",
    "all_relationship_weights",
    "apply_event",
    "correlate",
    "degree_centrality",
    "errors",
    "estimate_traversals",
    "evaluate",
    "evaluation_pairs",
    "extract_hierarchy",
    "hierarchy_json",
    "init_network",
    "load_bucket",
    "make_server",
    "normalize_weights",
    "parse_method_request",
    "rankings_csv",
    "relationship_csv",
    "relationship_weight",
    "run_experiment",
    "run_http_experiment",
    "run_session",
    "run_simulation",
    "save_bucket",
    "top_k",
    "validate_bucket_id",
    "weighted_degree_centrality",
]
