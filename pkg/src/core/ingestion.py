"""
Ingestion of line-oriented carrier files into an association store
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Callable, Dict, Iterator, List, Optional, Set, Tuple, Union

from tqdm import tqdm

from src.config.settings import (
    BLANK_NODE_PREFIX,
    COMMENT_PREFIX,
    GRAPH_ROOT_DIRECTIVE,
    MAX_LINE_BYTES,
    SHOW_PROGRESS,
)
from src.core.mapping import Association, KvMode, map_batch, map_to_associations
from src.models.carriers import GraphData, WideCell
from src.models.errors import LineParseError, RecordError, StoreFrozenError
from src.models.store import AssociationStore, SourceDescriptor, SourceKind
from src.utils.parsers import (
    parse_doc,
    parse_kv,
    parse_node_value,
    parse_ntriples,
    parse_root,
    parse_wide,
)

logger = logging.getLogger(__name__)


@dataclass
class IngestReport:
    """Outcome of one ingest call"""
    source: SourceDescriptor
    parse_errors: List[Tuple[int, str]] = field(default_factory=list)
    accepted: int = 0
    notices: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def processed(self) -> int:
        return self.accepted + len(self.parse_errors)


def _raw_lines(handle: BinaryIO) -> Iterator[Optional[bytes]]:
    """Lines of at most MAX_LINE_BYTES plus terminator; None stands for a longer line, skipped unread"""
    limit = MAX_LINE_BYTES + 2
    while True:
        raw = handle.readline(limit)
        if not raw:
            return
        if len(raw) == limit and not raw.endswith(b"\n"):
            while raw and not raw.endswith(b"\n"):
                raw = handle.readline(limit)
            yield None
            continue
        yield raw


def read_lines(path: Union[str, Path]) -> Iterator[Tuple[int, Optional[str], Optional[str]]]:
    """Yield (line number, text, problem) for every non-blank, non-comment line"""
    with open(path, "rb") as handle:
        for number, raw in enumerate(tqdm(_raw_lines(handle), desc=f"reading {Path(path).name}", unit="line",
                                          disable=not SHOW_PROGRESS), start=1):
            if raw is None:
                yield number, None, f"line longer than {MAX_LINE_BYTES} bytes"
                continue
            body = raw[:-1] if raw.endswith(b"\n") else raw
            if body.endswith(b"\r"):
                body = body[:-1]
            if len(body) > MAX_LINE_BYTES:
                yield number, None, f"line longer than {MAX_LINE_BYTES} bytes"
                continue
            try:
                text = body.decode("utf-8")
            except UnicodeDecodeError as e:
                yield number, None, f"invalid UTF-8 at byte {e.start}"
                continue
            if not text.strip() or text.startswith(COMMENT_PREFIX):
                continue
            yield number, text, None


class _GraphBuilder:
    """Collects graph lines; the whole file forms one graph record"""

    def __init__(self):
        self.arcs: List[Tuple[str, str, str]] = []
        self.values: Dict[str, str] = {}
        self.root: Optional[str] = None

    def take(self, text: str) -> None:
        if text.startswith(GRAPH_ROOT_DIRECTIVE + "\t"):
            node = parse_root(text)
            if self.root is not None and self.root != node:
                raise LineParseError(f"root already set to '{self.root}'")
            self.root = node
        elif text.lstrip().startswith(("<", BLANK_NODE_PREFIX)):
            triple = parse_ntriples(text)
            if triple.literal:
                raise LineParseError("graph arcs must end in a node, not a literal")
            self.arcs.append((triple.subject, triple.predicate, triple.object))
        else:
            node, value = parse_node_value(text)
            if node in self.values and self.values[node] != value:
                raise LineParseError(f"node '{node}' already has value '{self.values[node]}'")
            self.values[node] = value

    def build(self) -> Optional[GraphData]:
        nodes = {node for parent, _, child in self.arcs for node in (parent, child)}
        nodes.update(self.values)
        if self.root is not None:
            nodes.add(self.root)
        if not nodes:
            return None
        return GraphData(nodes=frozenset(nodes), root=self.root, arcs=tuple(self.arcs), values=dict(self.values))


def _store_all(store: AssociationStore, source: SourceDescriptor, associations: List[Association]) -> None:
    for entity, feature, count in associations:
        store.add_association(entity, feature, count, source=source.name)


def ingest(path: Union[str, Path], kind: SourceKind, source_name: str, store: AssociationStore,
           namespace: Optional[str] = None, latest_only: bool = False,
           kv_mode: KvMode = KvMode.LITERAL) -> IngestReport:
    """Parse, map and accumulate one file; malformed lines are reported and skipped"""
    if store.frozen:
        raise StoreFrozenError(f"cannot ingest '{path}': store is frozen")
    kind = SourceKind(kind)
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file '{path}' not found")
    ns = namespace or source_name
    if not ns or "/" in ns:
        raise ValueError(f"entity namespace '{ns}' must be non-empty and free of '/'")
    source = store.register_source(source_name, kind)
    report = IngestReport(source=source)

    seen_versions: Set[Tuple[str, str, str, int]] = set()
    seen_docs: Dict[str, int] = {}
    pending_cells: List[WideCell] = []
    graph = _GraphBuilder()

    def reject(number: int, message: str) -> None:
        report.parse_errors.append((number, message))
        logger.debug("%s line %d skipped: %s", path, number, message)

    def on_kv(number: int, text: str) -> None:
        _store_all(store, source, map_to_associations(parse_kv(text), source, ns, kv_mode))

    def on_wide(number: int, text: str) -> None:
        cell = parse_wide(text)
        if cell.version_key in seen_versions:
            raise LineParseError(
                f"duplicate version of {cell.row} {cell.family}:{cell.qualifier} at {cell.timestamp}")
        seen_versions.add(cell.version_key)
        if latest_only:
            pending_cells.append(cell)
        else:
            _store_all(store, source, map_to_associations(cell, source, ns))

    def on_doc(number: int, text: str) -> None:
        doc = parse_doc(text)
        associations = map_to_associations(doc, source, ns)
        if doc.id in seen_docs:
            report.notices.append((number, f"duplicate _id '{doc.id}' (first seen on line {seen_docs[doc.id]})"))
        else:
            seen_docs[doc.id] = number
        _store_all(store, source, associations)

    def on_rdf(number: int, text: str) -> None:
        _store_all(store, source, map_to_associations(parse_ntriples(text), source, ns))

    def on_graph(number: int, text: str) -> None:
        graph.take(text)

    handlers: Dict[SourceKind, Callable[[int, str], None]] = {
        SourceKind.KV: on_kv,
        SourceKind.WIDE: on_wide,
        SourceKind.DOC: on_doc,
        SourceKind.RDF: on_rdf,
        SourceKind.GRAPH: on_graph,
    }
    handle = handlers[kind]

    for number, text, problem in read_lines(path):
        if problem is not None:
            reject(number, problem)
            continue
        try:
            handle(number, text)
        except (LineParseError, RecordError) as e:
            reject(number, getattr(e, "message", str(e)))
            continue
        report.accepted += 1

    if pending_cells:
        _store_all(store, source, map_batch(pending_cells, source, ns, latest_only=True))
    if kind == SourceKind.GRAPH:
        record = graph.build()
        if record is not None:
            _store_all(store, source, map_to_associations(record, source, ns))

    source.records_ingested += report.accepted
    logger.info("ingested %s into source %s: %d accepted, %d errors",
                path, source.name, report.accepted, len(report.parse_errors))
    return report
