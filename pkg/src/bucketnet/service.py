"""HTTP endpoint layer: bucket display, traversal redirects, addElement.

Every link a bucket displays routes back through the displaying bucket: the
anchor URL names the current bucket with a referer argument (the current
bucket again) and a redirect argument carrying the target bucket's display
request. Following such a URL is what constitutes a traversal: the service
emits one traversal event, reinforces the graph, persists the dirty
buckets, then answers with a redirect to the target's plain display.

Session tokens (cookie, with a query-parameter fallback) give the engine
its two-bucket memory. The explicit referer argument wins over session
memory when both could name the hop's origin.

All mutation is serialized through one lock: the single-writer driver.
"""

from __future__ import annotations

import html
import json
import secrets
import threading
import time
from dataclasses import dataclass
from http.cookies import SimpleCookie
from typing import Callable
from urllib.parse import parse_qs, quote, urlsplit

from . import centrality as centrality_mod
from . import hierarchy as hierarchy_mod
from .errors import (
    BucketNetError,
    DuplicateElement,
    IoFailure,
    MalformedRedirect,
    MalformedXml,
    NotFound,
    RequestParseError,
    SchemaViolation,
    SelfHop,
    SelfLink,
    UnknownBucket,
    UnknownMethod,
)
from .graph import LinkGraph, validate_bucket_id
from .reinforcement import (
    ReinforcementConfig,
    ReinforcementRecord,
    SessionRegistry,
    TraversalEvent,
    WeightLedger,
    apply_event,
    rollback,
)
from .store import BucketStore, Element, add_element, parse_record

METHOD_DISPLAY = "display"
METHOD_ADD_ELEMENT = "addElement"
_KNOWN_METHODS = (METHOD_DISPLAY, METHOD_ADD_ELEMENT)

MAX_REDIRECT_DEPTH = 3
SESSION_COOKIE = "bucketnet_session"


@dataclass(frozen=True)
class MethodRequest:
    """A parsed bucket method invocation."""

    bucket: str
    method: str = METHOD_DISPLAY
    referer: str | None = None
    redirect: "MethodRequest | None" = None
    session_token: str | None = None
    format: str | None = None

    def final_destination(self) -> str:
        """The bucket named by the innermost redirect (self if none)."""
        req: MethodRequest = self
        while req.redirect is not None:
            req = req.redirect
        return req.bucket


def parse_method_request(raw_url: str, _depth: int = 0) -> MethodRequest:
    """Total parse of a raw URL into a MethodRequest or a structured error.

    Absent method means display. Redirect values are URL-decoded and
    parsed recursively, at most MAX_REDIRECT_DEPTH levels deep.
    """
    try:
        parts = urlsplit(raw_url)
    except ValueError as exc:
        raise RequestParseError(f"unparseable URL: {exc}") from exc
    segments = [s for s in parts.path.split("/") if s]
    if len(segments) != 1:
        raise RequestParseError(f"expected /<bucketId>, got path {parts.path!r}")
    try:
        bucket = validate_bucket_id(segments[0])
    except BucketNetError as exc:
        raise RequestParseError(str(exc)) from exc

    params = parse_qs(parts.query, keep_blank_values=True)

    def first(name: str) -> str | None:
        values = params.get(name)
        return values[0] if values else None

    method = first("method") or METHOD_DISPLAY
    if method not in _KNOWN_METHODS:
        raise UnknownMethod(f"unknown bucket method: {method!r}")

    referer = first("referer")
    if referer is not None:
        try:
            validate_bucket_id(referer)
        except BucketNetError as exc:
            raise RequestParseError(f"bad referer: {exc}") from exc

    redirect_raw = first("redirect")
    redirect = None
    if redirect_raw is not None:
        if _depth + 1 > MAX_REDIRECT_DEPTH:
            raise MalformedRedirect(
                f"redirect nesting exceeds {MAX_REDIRECT_DEPTH} levels"
            )
        try:
            redirect = parse_method_request(redirect_raw, _depth=_depth + 1)
        except MalformedRedirect:
            raise
        except RequestParseError as exc:
            raise MalformedRedirect(f"unparseable redirect: {exc}") from exc

    fmt = first("format")
    if fmt is None and first("accept") == "json":
        fmt = "json"

    return MethodRequest(
        bucket=bucket,
        method=method,
        referer=referer,
        redirect=redirect,
        session_token=first("session"),
        format=fmt,
    )


@dataclass(frozen=True)
class DisplayLink:
    display_name: str
    url: str
    weight: float
    target: str


@dataclass
class DisplayPayload:
    """What a bucket shows: metadata plus its weight-ranked link list."""

    bucket: str
    title: str
    metadata: list[tuple[str, str]]
    links: list[DisplayLink]
    session_token: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "bucket": self.bucket,
                "title": self.title,
                "metadata": [[k, v] for k, v in self.metadata],
                "links": [
                    {
                        "name": l.display_name,
                        "url": l.url,
                        "weight": l.weight,
                        "target": l.target,
                    }
                    for l in self.links
                ],
                "session": self.session_token,
            },
            sort_keys=True,
        )

    def to_html(self) -> str:
        items = "\n".join(
            f'      <li><a href="{html.escape(l.url, quote=True)}" '
            f'data-weight="{l.weight}">{html.escape(l.display_name)}</a></li>'
            for l in self.links
        )
        meta = "\n".join(
            f"      <dt>{html.escape(k)}</dt><dd>{html.escape(v)}</dd>"
            for k, v in self.metadata
        )
        return (
            "<!DOCTYPE html>\n"
            "<html>\n"
            f"  <head><title>{html.escape(self.title)}</title></head>\n"
            "  <body>\n"
            f"    <h1>{html.escape(self.title)}</h1>\n"
            f"    <dl>\n{meta}\n    </dl>\n"
            f"    <ol class=\"links\">\n{items}\n    </ol>\n"
            "  </body>\n"
            "</html>\n"
        )


@dataclass
class Response:
    status: int
    headers: list[tuple[str, str]]
    body: bytes

    @property
    def text(self) -> str:
        return self.body.decode("utf-8")


def _status_line(status: int) -> str:
    reasons = {
        200: "OK",
        302: "Found",
        400: "Bad Request",
        404: "Not Found",
        405: "Method Not Allowed",
        409: "Conflict",
        500: "Internal Server Error",
    }
    return f"{status} {reasons.get(status, 'Unknown')}"


class BucketService:
    """Single-process service owning the graph, store, sessions and audit
    log. One lock serializes every mutation (the single-writer driver);
    displays read the latest completed state."""

    def __init__(
        self,
        store: BucketStore,
        config: ReinforcementConfig | None = None,
        session_ttl: float = 1800.0,
        clock: Callable[[], float] = time.time,
        token_factory: Callable[[], str] | None = None,
    ) -> None:
        self.store = store
        self.config = config or ReinforcementConfig()
        self.clock = clock
        self.token_factory = token_factory or (lambda: secrets.token_hex(8))
        self.graph: LinkGraph = store.sync_graph()
        self.sessions = SessionRegistry(ttl=session_ttl)
        self.ledger = WeightLedger(initial_weight=self.graph.total_weight())
        self.audit_path = store.data_dir / "audit.log"
        self._lock = threading.Lock()

    # --- traversal core ------------------------------------------------

    def _append_audit(self, records: list[ReinforcementRecord]) -> None:
        if not records:
            return
        lines = "".join(record.audit_line() + "\n" for record in records)
        with open(self.audit_path, "a", encoding="utf-8") as handle:
            handle.write(lines)
            handle.flush()

    def apply_traversal(self, event: TraversalEvent) -> list[ReinforcementRecord]:
        """Apply one event, persist the dirty buckets, append the audit
        log. All-or-nothing: a persistence failure rolls the graph back."""
        with self._lock:
            session = self.sessions.session_for(event.session_id, event.at)
            records = apply_event(event, session, self.graph, self.config, self.ledger)
            if records:
                dirty = {record.source for record in records}
                try:
                    self.store.write_graph(self.graph, sources=dirty)
                except IoFailure:
                    rollback(self.graph, records)
                    self.ledger.hop_count -= 1
                    for record in records:
                        self.ledger.add(-record.delta)
                    if any(r.rule == "transitivity" for r in records):
                        self.ledger.transitive_hops -= 1
                    raise
                self._append_audit(records)
            return records

    # --- request handling ------------------------------------------------

    def handle(
        self,
        http_method: str,
        raw_url: str,
        body: bytes = b"",
        content_type: str | None = None,
        cookie_header: str | None = None,
    ) -> Response:
        try:
            response = self._dispatch(
                http_method, raw_url, body, content_type, cookie_header
            )
        except (MalformedRedirect, UnknownMethod, RequestParseError) as exc:
            response = self._error(400, exc)
        except (NotFound, UnknownBucket) as exc:
            response = self._error(404, exc)
        except DuplicateElement as exc:
            response = self._error(409, exc)
        except (SchemaViolation, MalformedXml, SelfHop, SelfLink, ValueError) as exc:
            response = self._error(400, exc)
        except IoFailure as exc:
            response = self._error(500, exc)
        # Browser clients may be served from a different origin.
        response.headers.append(("Access-Control-Allow-Origin", "*"))
        return response

    def _error(self, status: int, exc: Exception) -> Response:
        payload = json.dumps({"error": type(exc).__name__, "detail": str(exc)})
        return Response(
            status=status,
            headers=[("Content-Type", "application/json")],
            body=payload.encode("utf-8"),
        )

    def _dispatch(
        self,
        http_method: str,
        raw_url: str,
        body: bytes,
        content_type: str | None,
        cookie_header: str | None,
    ) -> Response:
        parts = urlsplit(raw_url)
        if parts.path.startswith("/_analytics/"):
            return self._handle_analytics(parts.path, parse_qs(parts.query))

        request = parse_method_request(raw_url)
        token = request.session_token or self._cookie_token(cookie_header)

        if request.method == METHOD_ADD_ELEMENT:
            if http_method != "POST":
                return self._error(405, ValueError("addElement requires POST"))
            return self._handle_add_element(request, body, content_type)

        if http_method != "GET":
            return self._error(405, ValueError("display requires GET"))
        return self._handle_display(request, token)

    def _cookie_token(self, cookie_header: str | None) -> str | None:
        if not cookie_header:
            return None
        jar = SimpleCookie()
        jar.load(cookie_header)
        morsel = jar.get(SESSION_COOKIE)
        return morsel.value if morsel else None

    # --- display / traversal ---------------------------------------------

    def traversal_url(self, current: str, target: str, token: str) -> str:
        inner = f"/{target}?method=display"
        return (
            f"/{current}?method=display&referer={current}"
            f"&redirect={quote(inner, safe='')}&session={token}"
        )

    def _handle_display(self, request: MethodRequest, token: str | None) -> Response:
        if not self.store.exists(request.bucket):
            raise UnknownBucket(f"no such bucket: {request.bucket}")
        token = token or self.token_factory()

        if request.redirect is not None:
            destination = request.final_destination()
            if not self.store.exists(destination):
                raise UnknownBucket(f"redirect names unknown bucket: {destination}")
            now = self.clock()
            with self._lock:
                session = self.sessions.session_for(token, now)
                origin = request.referer or session.previous
            event = TraversalEvent(
                session_id=token, origin=origin, destination=destination, at=now
            )
            self.apply_traversal(event)
            location = f"/{destination}?method=display&session={token}"
            if request.format:
                location += f"&format={request.format}"
            return Response(
                status=302,
                headers=[
                    ("Location", location),
                    ("Set-Cookie", f"{SESSION_COOKIE}={token}; Path=/"),
                ],
                body=b"",
            )

        now = self.clock()
        with self._lock:
            session = self.sessions.session_for(token, now)
            if session.previous is None:
                # Session-opening entry: seed memory, no reinforcement.
                apply_event(
                    TraversalEvent(
                        session_id=token, origin=None, destination=request.bucket, at=now
                    ),
                    session,
                    self.graph,
                    self.config,
                )
        payload = self.build_display(request.bucket, token)
        headers = [("Set-Cookie", f"{SESSION_COOKIE}={token}; Path=/")]
        if request.format == "json":
            headers.append(("Content-Type", "application/json"))
            return Response(200, headers, payload.to_json().encode("utf-8"))
        headers.append(("Content-Type", "text/html; charset=utf-8"))
        return Response(200, headers, payload.to_html().encode("utf-8"))

    def build_display(self, bucket: str, token: str) -> DisplayPayload:
        record = self.store.load(bucket)
        links = [
            DisplayLink(
                display_name=self.store.title_of(target),
                url=self.traversal_url(bucket, target, token),
                weight=weight,
                target=target,
            )
            for target, weight in self.graph.ranked_links(bucket)
        ]
        return DisplayPayload(
            bucket=bucket,
            title=record.title or bucket,
            metadata=record.metadata,
            links=links,
            session_token=token,
        )

    # --- addElement --------------------------------------------------------

    def _parse_element_body(self, body: bytes, content_type: str | None) -> Element:
        text = body.decode("utf-8")
        if content_type and "json" in content_type:
            data = json.loads(text)
            weight = data.get("weight")
            return Element(
                element_id=str(data["elementId"]),
                kind=str(data.get("kind", "content")),
                display_name=str(data.get("displayName", "")),
                href=data.get("href"),
                weight=None if weight is None else float(weight),
            )
        # XML body: a single <element .../> wrapped into a scratch bucket.
        wrapper = (
            f'<bucket id="scratch"><metadata/><elements>{text}</elements></bucket>'
        )
        record = parse_record(wrapper.encode("utf-8"))
        if len(record.elements) != 1:
            raise SchemaViolation("addElement body must contain exactly one element")
        return record.elements[0]

    def _handle_add_element(
        self, request: MethodRequest, body: bytes, content_type: str | None
    ) -> Response:
        if not self.store.exists(request.bucket):
            raise UnknownBucket(f"no such bucket: {request.bucket}")
        element = self._parse_element_body(body, content_type)
        element.validate()
        with self._lock:
            record = self.store.load(request.bucket)
            target = element.bucket_target
            if target is not None:
                if not self.store.exists(target):
                    raise SchemaViolation(f"link element points at unknown bucket: {target}")
                if target == request.bucket:
                    raise SchemaViolation("self-link element forbidden")
            add_element(record, element)
            self.store.save(record)
            if target is not None:
                assert element.weight is not None
                self.graph.add_link(request.bucket, target, element.weight)
        ack = json.dumps(
            {"status": "ok", "bucket": request.bucket, "elementId": element.element_id}
        )
        return Response(200, [("Content-Type", "application/json")], ack.encode("utf-8"))

    # --- analytics ---------------------------------------------------------

    def _handle_analytics(self, path: str, params: dict[str, list[str]]) -> Response:
        def first(name: str, default: str | None = None) -> str | None:
            values = params.get(name)
            return values[0] if values else default

        snapshot = self.graph.copy()
        if path == "/_analytics/centrality":
            metric = first("metric", centrality_mod.METRIC_DEGREE) or ""
            if metric not in (centrality_mod.METRIC_DEGREE, centrality_mod.METRIC_WEIGHTED):
                raise RequestParseError(f"unknown metric: {metric!r}")
            k_raw = first("k")
            csv_text = centrality_mod.rankings_csv(snapshot)
            if k_raw is not None:
                k = int(k_raw)
                if k < 1:
                    raise RequestParseError("k must be >= 1")
                ranked = centrality_mod.top_k(snapshot, k, metric)
                keep = {s.bucket for s in ranked}
                lines = csv_text.splitlines()
                header, rows = lines[0], lines[1:]
                rows = [r for r in rows if r.split(",", 1)[0] in keep]
                csv_text = "\n".join([header, *rows]) + "\n"
            return Response(200, [("Content-Type", "text/csv")], csv_text.encode("utf-8"))

        if path == "/_analytics/hierarchy":
            root = first("root")
            if not root:
                raise RequestParseError("hierarchy requires a root parameter")
            depth = int(first("depth", str(hierarchy_mod.DEFAULT_DEPTH_LIMIT)) or 0)
            branch = int(first("branch", str(hierarchy_mod.DEFAULT_BRANCH_LIMIT)) or 0)
            min_weight = float(
                first("min_weight", str(hierarchy_mod.DEFAULT_MIN_WEIGHT)) or 0
            )
            tree = hierarchy_mod.extract_hierarchy(
                snapshot, root, depth_limit=depth, branch_limit=branch, min_weight=min_weight
            )
            return Response(
                200,
                [("Content-Type", "application/json")],
                hierarchy_mod.hierarchy_json(tree).encode("utf-8"),
            )

        raise NotFound(f"unknown analytics endpoint: {path}")

    # --- WSGI ----------------------------------------------------------------

    def wsgi_app(self, environ, start_response):
        raw_url = environ.get("PATH_INFO", "/")
        query = environ.get("QUERY_STRING", "")
        if query:
            raw_url = f"{raw_url}?{query}"
        length = int(environ.get("CONTENT_LENGTH") or 0)
        body = environ["wsgi.input"].read(length) if length else b""
        response = self.handle(
            environ.get("REQUEST_METHOD", "GET"),
            raw_url,
            body=body,
            content_type=environ.get("CONTENT_TYPE"),
            cookie_header=environ.get("HTTP_COOKIE"),
        )
        start_response(_status_line(response.status), response.headers)
        return [response.body]


def make_server(service: BucketService, host: str, port: int):
    """A wsgiref server hosting the service; returned unstarted."""
    from wsgiref.simple_server import WSGIRequestHandler, make_server as _make

    class QuietHandler(WSGIRequestHandler):
        def log_message(self, format, *args):  # noqa: A002 - wsgiref signature
            pass

    return _make(host, port, service.wsgi_app, handler_class=QuietHandler)
