"""Operator entry point: init / serve / simulate / analyze.

Option precedence is defaults < config file < flags. The config file is
flat key=value text, '#' starts a comment; keys match the long flag names
with underscores.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import signal
import sys
import threading
from pathlib import Path

from .centrality import METRIC_DEGREE, METRIC_WEIGHTED, rankings_csv, top_k
from .errors import BucketNetError, InsufficientData, InvalidParameters
from .hierarchy import (
    DEFAULT_BRANCH_LIMIT,
    DEFAULT_DEPTH_LIMIT,
    DEFAULT_MIN_WEIGHT,
    extract_hierarchy,
    hierarchy_json,
    relationship_csv,
)
from .reinforcement import ReinforcementConfig
from .service import BucketService, make_server
from .simulation import (
    SimulationSettings,
    evaluation_pairs,
    init_network,
    run_experiment,
)
from .store import BucketStore

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value text; '#' comments and blank lines are ignored."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError(f"{path}:{lineno}: expected key=value, got {raw!r}", EXIT_USAGE)
        values[key.strip()] = value.strip()
    return values


def _as_bool(raw: str) -> bool:
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _merged(args: argparse.Namespace, name: str, default, cast):
    """defaults < config file < explicit flag."""
    flag_value = getattr(args, name, None)
    if flag_value is not None:
        return flag_value
    file_values: dict[str, str] = getattr(args, "_file_values", {})
    if name in file_values:
        try:
            return cast(file_values[name])
        except (TypeError, ValueError) as exc:
            raise CliError(f"config value {name}={file_values[name]!r}: {exc}", EXIT_USAGE)
    return default


def build_parser() -> _Parser:
    parser = _Parser(prog="bucketnet", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")

    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", parents=[common], help="create a fresh network")
    p_init.add_argument("--data-dir", dest="data_dir")
    p_init.add_argument("--buckets", type=int)
    p_init.add_argument("--links-per-bucket", dest="links_per_bucket", type=int)
    p_init.add_argument("--initial-weight", dest="initial_weight", type=float)
    p_init.add_argument("--seed", type=int)
    p_init.add_argument("--force", action="store_true", default=None)

    p_serve = sub.add_parser("serve", parents=[common], help="run the bucket service")
    p_serve.add_argument("--data-dir", dest="data_dir")
    p_serve.add_argument("--host")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--session-ttl", dest="session_ttl", type=float)
    p_serve.add_argument("--frequency", type=float)
    p_serve.add_argument("--symmetry", type=float)
    p_serve.add_argument("--transitivity", type=float)

    p_sim = sub.add_parser("simulate", parents=[common], help="run a simulated experiment")
    p_sim.add_argument("--data-dir", dest="data_dir")
    p_sim.add_argument("--ephemeral", action="store_true", default=None)
    p_sim.add_argument(
        "--service-url", dest="service_url",
        help="drive a live service over HTTP instead of the in-process engine",
    )
    p_sim.add_argument("--buckets", type=int)
    p_sim.add_argument("--links-per-bucket", dest="links_per_bucket", type=int)
    p_sim.add_argument("--initial-weight", dest="initial_weight", type=float)
    p_sim.add_argument("--users", type=int)
    p_sim.add_argument("--sessions", type=int)
    p_sim.add_argument("--hops-target", dest="hops_target", type=int)
    p_sim.add_argument("--adherence", type=float)
    p_sim.add_argument("--mean-session-length", dest="mean_session_length", type=float)
    p_sim.add_argument("--genre-size", dest="genre_size", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--portal")
    p_sim.add_argument("--trace", help="write per-reinforcement audit lines to this file")
    p_sim.add_argument(
        "--pairs-csv", dest="pairs_csv",
        help="write (bucket, relationship weight, ground truth) CSV to this file",
    )
    p_sim.add_argument("--frequency", type=float)
    p_sim.add_argument("--symmetry", type=float)
    p_sim.add_argument("--transitivity", type=float)

    p_analyze = sub.add_parser("analyze", parents=[common], help="export analytics")
    analyze_sub = p_analyze.add_subparsers(dest="what", required=True)
    p_cent = analyze_sub.add_parser("centrality", parents=[common])
    p_cent.add_argument("--data-dir", dest="data_dir")
    p_cent.add_argument("--metric", choices=[METRIC_DEGREE, METRIC_WEIGHTED])
    p_cent.add_argument("-k", type=int)
    p_hier = analyze_sub.add_parser("hierarchy", parents=[common])
    p_hier.add_argument("--data-dir", dest="data_dir")
    p_hier.add_argument("--root")
    p_hier.add_argument("--depth", type=int)
    p_hier.add_argument("--branch", type=int)
    p_hier.add_argument("--min-weight", dest="min_weight", type=float)
    return parser


def _require_data_dir(args) -> Path:
    data_dir = _merged(args, "data_dir", None, str)
    if not data_dir:
        raise CliError("--data-dir is required", EXIT_USAGE)
    return Path(data_dir)


def _open_store(args) -> BucketStore:
    data_dir = _require_data_dir(args)
    store = BucketStore(data_dir)
    if not store.buckets_dir.is_dir() or not store.bucket_ids():
        raise CliError(f"{data_dir} is not an initialized data directory", EXIT_DATA)
    return store


def cmd_init(args) -> int:
    data_dir = _require_data_dir(args)
    force = bool(_merged(args, "force", False, _as_bool))
    store = BucketStore(data_dir)
    if store.bucket_ids() and not force:
        raise CliError(
            f"{data_dir} already holds buckets; pass --force to reinitialize", EXIT_DATA
        )
    graph = init_network(
        _merged(args, "buckets", 150, int),
        _merged(args, "links_per_bucket", 3, int),
        _merged(args, "initial_weight", 0.5, float),
        seed=_merged(args, "seed", 0, int),
        store=store,
    )
    print(
        f"{graph.node_count} buckets, {graph.edge_count} links, "
        f"total weight {graph.total_weight()}"
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    store = _open_store(args)
    config = ReinforcementConfig(
        frequency=_merged(args, "frequency", 1.0, float),
        symmetry=_merged(args, "symmetry", 0.5, float),
        transitivity=_merged(args, "transitivity", 0.3, float),
    )
    service = BucketService(
        store, config=config, session_ttl=_merged(args, "session_ttl", 1800.0, float)
    )
    host = _merged(args, "host", "127.0.0.1", str)
    port = _merged(args, "port", 8400, int)
    try:
        server = make_server(service, host, port)
    except OSError as exc:
        raise CliError(f"cannot bind {host}:{port}: {exc}", EXIT_RUNTIME)

    stop = threading.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: stop.set())
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    print(f"serving {store.data_dir} on http://{host}:{port}/", file=sys.stderr)
    stop.wait()
    server.shutdown()
    thread.join()
    # Per-event persistence means the store is already flushed; write the
    # full graph once more so shutdown leaves every file current.
    service.store.write_graph(service.graph)
    return EXIT_OK


def cmd_simulate(args) -> int:
    service_url = _merged(args, "service_url", None, str)
    ephemeral = bool(_merged(args, "ephemeral", False, _as_bool))
    graph = None
    store = None
    if not ephemeral and service_url is None:
        store = _open_store(args)
        graph = store.sync_graph()
    settings = SimulationSettings(
        buckets=_merged(args, "buckets", 150, int),
        links_per_bucket=_merged(args, "links_per_bucket", 3, int),
        initial_weight=_merged(args, "initial_weight", 0.5, float),
        users=_merged(args, "users", 15, int),
        adherence=_merged(args, "adherence", 0.8, float),
        mean_session_length=_merged(args, "mean_session_length", 8.0, float),
        sessions=_merged(args, "sessions", None, int),
        hops_target=_merged(args, "hops_target", None, int),
        seed=_merged(args, "seed", 0, int),
        portal=_merged(args, "portal", None, str),
        genre_size=_merged(args, "genre_size", 10, int),
        frequency=_merged(args, "frequency", 1.0, float),
        symmetry=_merged(args, "symmetry", 0.5, float),
        transitivity=_merged(args, "transitivity", 0.3, float),
    )
    if settings.sessions is None and settings.hops_target is None:
        settings.hops_target = 1000
    if service_url is not None:
        from .http_driver import run_http_experiment

        print(run_http_experiment(settings, service_url.rstrip("/")).to_json())
        return EXIT_OK
    sink = [] if args.trace else None
    report, trained, model = run_experiment(settings, graph=graph, sink=sink)
    if store is not None and graph is not None:
        store.write_graph(graph)
    if args.trace and sink is not None:
        with open(args.trace, "w", encoding="utf-8") as handle:
            for record in sink:
                handle.write(record.audit_line() + "\n")
    if args.pairs_csv:
        scores, truth = evaluation_pairs(
            trained, model,
            depth_limit=settings.depth_limit,
            branch_limit=settings.branch_limit,
            min_weight=settings.min_weight,
        )
        with open(args.pairs_csv, "w", encoding="utf-8") as handle:
            handle.write(relationship_csv(scores, truth))
    print(report.to_json())
    return EXIT_OK


def cmd_analyze(args) -> int:
    store = _open_store(args)
    graph = store.sync_graph()
    if args.what == "centrality":
        metric = _merged(args, "metric", METRIC_DEGREE, str)
        csv_text = rankings_csv(graph)
        k = _merged(args, "k", None, int)
        if k is not None:
            keep = {s.bucket for s in top_k(graph, k, metric)}
            lines = csv_text.splitlines()
            csv_text = "\n".join([lines[0], *[l for l in lines[1:] if l.split(",", 1)[0] in keep]]) + "\n"
        sys.stdout.write(csv_text)
        return EXIT_OK
    root = _merged(args, "root", None, str)
    if not root:
        raise CliError("hierarchy requires --root", EXIT_USAGE)
    tree = extract_hierarchy(
        graph,
        root,
        depth_limit=_merged(args, "depth", DEFAULT_DEPTH_LIMIT, int),
        branch_limit=_merged(args, "branch", DEFAULT_BRANCH_LIMIT, int),
        min_weight=_merged(args, "min_weight", DEFAULT_MIN_WEIGHT, float),
    )
    print(hierarchy_json(tree))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            args._file_values = read_config_file(args.config)
        else:
            args._file_values = {}
        handlers = {
            "init": cmd_init,
            "serve": cmd_serve,
            "simulate": cmd_simulate,
            "analyze": cmd_analyze,
        }
        return handlers[args.command](args)
    except CliError as exc:
        print(f"bucketnet: {exc}", file=sys.stderr)
        return exc.code
    except (InvalidParameters, InsufficientData) as exc:
        print(f"bucketnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BucketNetError as exc:
        print(f"bucketnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"bucketnet: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"bucketnet: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
