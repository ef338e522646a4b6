"""One self-contained XML file per bucket, with atomic updates.

A bucket file holds the bucket's metadata fields and an ordered element
list. Elements are either content (text payloads such as a description) or
pointers (href-bearing). A pointer whose href names another bucket in the
same network carries the link weight as an attribute; those elements are
exactly the edges of the link graph, so the store and the graph can be
synchronized in both directions.

Layout on disk: <data_dir>/buckets/<id>.xml

Schema:
    <bucket id="...">
      <metadata>
        <field key="...">value</field>
      </metadata>
      <elements>
        <element id="..." kind="pointer|content" href="..." weight="...">name</element>
      </elements>
    </bucket>
"""

from __future__ import annotations

import os
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateElement,
    InvalidBucketId,
    IoFailure,
    MalformedXml,
    NotFound,
    SchemaViolation,
)
from .graph import LinkGraph, validate_bucket_id

KIND_CONTENT = "content"
KIND_POINTER = "pointer"

_LINK_ELEMENT_PREFIX = "link-"
_TITLE_KEY = "title"


def bucket_href(bucket_id: str) -> str:
    """The in-network URL reference for a bucket."""
    return f"/{bucket_id}"


def href_bucket_target(href: str | None) -> str | None:
    """The bucket id an href points at, or None for external references."""
    if href is None or not href.startswith("/"):
        return None
    candidate = href[1:]
    try:
        validate_bucket_id(candidate)
    except InvalidBucketId:
        return None
    return candidate


@dataclass
class Element:
    """A unit inside a bucket: either content or a pointer.

    Pointers carry an href; pointers at other buckets additionally carry
    the link weight. Content elements carry neither.
    """

    element_id: str
    kind: str
    display_name: str
    href: str | None = None
    weight: float | None = None

    @property
    def bucket_target(self) -> str | None:
        if self.kind != KIND_POINTER:
            return None
        return href_bucket_target(self.href)

    @property
    def is_bucket_link(self) -> bool:
        return self.bucket_target is not None

    def validate(self) -> None:
        if self.kind not in (KIND_CONTENT, KIND_POINTER):
            raise SchemaViolation(f"element {self.element_id!r}: unknown kind {self.kind!r}")
        if self.kind == KIND_POINTER and not self.href:
            raise SchemaViolation(f"pointer element {self.element_id!r} lacks href")
        if self.kind == KIND_CONTENT and self.href is not None:
            raise SchemaViolation(f"content element {self.element_id!r} carries href")
        if self.is_bucket_link:
            if self.weight is None:
                raise SchemaViolation(
                    f"bucket link element {self.element_id!r} lacks a weight"
                )
            if self.weight < 0:
                raise SchemaViolation(
                    f"bucket link element {self.element_id!r} has negative weight"
                )
        elif self.weight is not None:
            raise SchemaViolation(
                f"element {self.element_id!r} carries a weight but is not a bucket link"
            )


def link_element(source: str, target: str, weight: float, display_name: str | None = None) -> Element:
    """The canonical element representing one graph edge."""
    return Element(
        element_id=f"{_LINK_ELEMENT_PREFIX}{target}",
        kind=KIND_POINTER,
        display_name=display_name or target,
        href=bucket_href(target),
        weight=weight,
    )


@dataclass
class BucketRecord:
    """In-memory form of one bucket file."""

    bucket_id: str
    title: str = ""
    metadata: list[tuple[str, str]] = field(default_factory=list)
    elements: list[Element] = field(default_factory=list)

    def element_ids(self) -> set[str]:
        return {e.element_id for e in self.elements}

    def links(self) -> list[Element]:
        return [e for e in self.elements if e.is_bucket_link]

    def link_targets(self) -> set[str]:
        return {e.bucket_target for e in self.links() if e.bucket_target}


def add_element(record: BucketRecord, element: Element) -> BucketRecord:
    """Append an element, enforcing id uniqueness and one link per target."""
    element.validate()
    if element.element_id in record.element_ids():
        raise DuplicateElement(
            f"element id {element.element_id!r} already present in {record.bucket_id!r}"
        )
    target = element.bucket_target
    if target is not None and target in record.link_targets():
        raise SchemaViolation(
            f"bucket {record.bucket_id!r} already links to {target!r}"
        )
    record.elements.append(element)
    return record


# --- XML (de)serialization ---------------------------------------------

def record_to_xml_bytes(record: BucketRecord) -> bytes:
    """Deterministic serialization: same record, identical bytes."""
    root = ET.Element("bucket", {"id": record.bucket_id})
    meta = ET.SubElement(root, "metadata")
    title_field = ET.SubElement(meta, "field", {"key": _TITLE_KEY})
    title_field.text = record.title
    for key, value in record.metadata:
        f = ET.SubElement(meta, "field", {"key": key})
        f.text = value
    elements = ET.SubElement(root, "elements")
    for element in record.elements:
        attrs = {"id": element.element_id, "kind": element.kind}
        if element.href is not None:
            attrs["href"] = element.href
        if element.weight is not None:
            attrs["weight"] = repr(element.weight)
        node = ET.SubElement(elements, "element", attrs)
        node.text = element.display_name
    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"


def parse_record(data: bytes, expected_id: str | None = None) -> BucketRecord:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(f"bucket file is not well-formed XML: {exc}") from exc
    if root.tag != "bucket":
        raise SchemaViolation(f"root tag must be <bucket>, got <{root.tag}>")
    bucket_id = root.get("id")
    if not bucket_id:
        raise SchemaViolation("<bucket> lacks an id attribute")
    validate_bucket_id(bucket_id)
    if expected_id is not None and bucket_id != expected_id:
        raise SchemaViolation(
            f"bucket id {bucket_id!r} does not match its storage name {expected_id!r}"
        )

    title = ""
    metadata: list[tuple[str, str]] = []
    meta_node = root.find("metadata")
    if meta_node is not None:
        saw_title = False
        for f in meta_node.findall("field"):
            key = f.get("key")
            if key is None:
                raise SchemaViolation(f"bucket {bucket_id!r}: <field> lacks key")
            value = f.text or ""
            if key == _TITLE_KEY and not saw_title:
                title = value
                saw_title = True
            else:
                metadata.append((key, value))

    record = BucketRecord(bucket_id=bucket_id, title=title, metadata=metadata)
    elements_node = root.find("elements")
    if elements_node is not None:
        for node in elements_node.findall("element"):
            element_id = node.get("id")
            kind = node.get("kind")
            if element_id is None or kind is None:
                raise SchemaViolation(
                    f"bucket {bucket_id!r}: <element> needs id and kind attributes"
                )
            raw_weight = node.get("weight")
            try:
                weight = None if raw_weight is None else float(raw_weight)
            except ValueError as exc:
                raise SchemaViolation(
                    f"bucket {bucket_id!r}: element {element_id!r} has non-numeric weight"
                ) from exc
            element = Element(
                element_id=element_id,
                kind=kind,
                display_name=node.text or "",
                href=node.get("href"),
                weight=weight,
            )
            element.validate()
            add_element_unchecked(record, element)
    return record


def add_element_unchecked(record: BucketRecord, element: Element) -> None:
    # Parser path: uniqueness still enforced, validation already done.
    if element.element_id in record.element_ids():
        raise SchemaViolation(
            f"bucket {record.bucket_id!r}: duplicate element id {element.element_id!r}"
        )
    record.elements.append(element)


def load_bucket(path: str | Path) -> BucketRecord:
    """Read and validate one bucket file."""
    path = Path(path)
    if not path.exists():
        raise NotFound(f"no bucket file at {path}")
    return parse_record(path.read_bytes(), expected_id=path.stem)


def save_bucket(record: BucketRecord, path: str | Path) -> None:
    """Write atomically: temp file in the same directory, then rename."""
    path = Path(path)
    data = record_to_xml_bytes(record)
    try:
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_name, path)
        except BaseException:
            try:
                os.unlink(tmp_name)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise IoFailure(f"failed to write {path}: {exc}") from exc


class BucketStore:
    """Directory of bucket files plus graph synchronization.

    All writes are expected to arrive through one owner; the store does
    not lock internally.
    """

    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self.buckets_dir = self.data_dir / "buckets"
        self.titles: dict[str, str] = {}

    def ensure_dirs(self) -> None:
        self.buckets_dir.mkdir(parents=True, exist_ok=True)

    def bucket_path(self, bucket_id: str) -> Path:
        return self.buckets_dir / f"{bucket_id}.xml"

    def bucket_ids(self) -> list[str]:
        if not self.buckets_dir.is_dir():
            return []
        return sorted(p.stem for p in self.buckets_dir.glob("*.xml"))

    def exists(self, bucket_id: str) -> bool:
        return self.bucket_path(bucket_id).exists()

    def load(self, bucket_id: str) -> BucketRecord:
        record = load_bucket(self.bucket_path(bucket_id))
        self.titles[bucket_id] = record.title
        return record

    def save(self, record: BucketRecord) -> None:
        save_bucket(record, self.bucket_path(record.bucket_id))
        self.titles[record.bucket_id] = record.title

    def title_of(self, bucket_id: str) -> str:
        return self.titles.get(bucket_id) or bucket_id

    # --- store <-> graph sync ---------------------------------------

    def sync_graph(self) -> LinkGraph:
        """Graph whose nodes are all stored buckets and whose edges are
        exactly the weighted bucket-link elements."""
        graph = LinkGraph()
        records: list[BucketRecord] = []
        for bucket_id in self.bucket_ids():
            record = self.load(bucket_id)
            graph.add_node(bucket_id)
            records.append(record)
        known = set(graph.nodes)
        for record in records:
            for element in record.links():
                target = element.bucket_target
                assert target is not None and element.weight is not None
                if target not in known:
                    raise SchemaViolation(
                        f"{self.bucket_path(record.bucket_id)}: link element "
                        f"{element.element_id!r} points at unknown bucket {target!r}"
                    )
                if target == record.bucket_id:
                    raise SchemaViolation(
                        f"{self.bucket_path(record.bucket_id)}: self-link element "
                        f"{element.element_id!r}"
                    )
                graph.add_link(record.bucket_id, target, element.weight)
        return graph

    def write_graph(self, graph: LinkGraph, sources: set[str] | None = None) -> None:
        """Update bucket files so their link elements match the graph.

        When sources is given, only those buckets are rewritten (the dirty
        set after an event); otherwise every bucket is.
        """
        for bucket_id in sorted(sources) if sources is not None else graph.nodes:
            record = self.load(bucket_id)
            kept = [e for e in record.elements if not e.is_bucket_link]
            names = {
                e.bucket_target: e.display_name for e in record.links() if e.display_name
            }
            record.elements = kept
            for target, weight in graph.ranked_links(bucket_id):
                record.elements.append(
                    link_element(
                        bucket_id,
                        target,
                        weight,
                        display_name=names.get(target) or self.title_of(target),
                    )
                )
            self.save(record)
