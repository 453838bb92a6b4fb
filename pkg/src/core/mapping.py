"""
Mapping of carrier records into entity-feature associations
"""

from collections import Counter
from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from src.config.settings import COMPOSITE_KEY_SEPARATOR, DISPATCHER_PREFIX, ROOT_FEATURE_KEY
from src.models.carriers import CarrierRecord, Document, GraphData, KvPair, RdfTriple, WideCell
from src.models.errors import RecordError
from src.models.identifiers import EntityId, FeatureId, FeatureKind
from src.models.store import SourceDescriptor


class KvMode(str, Enum):
    """LITERAL: value is the entity, key the feature. COMPOSITE: key is 'entity/attribute'"""
    LITERAL = "literal"
    COMPOSITE = "composite"


class Association(NamedTuple):
    entity: EntityId
    feature: FeatureId
    count: int


_Pair = Tuple[EntityId, FeatureId]


def _dispatch(out: Counter, ns: str, owner: str, name: str, target: str) -> None:
    out[(EntityId(ns, owner), FeatureId(FeatureKind.REF, name, target))] += 1
    out[(EntityId(ns, target), FeatureId(FeatureKind.REF_IN, name, owner))] += 1


def _map_kv(pair: KvPair, ns: str, mode: KvMode, out: Counter) -> None:
    if mode == KvMode.LITERAL:
        if not pair.value:
            raise RecordError("KvPair", f"key '{pair.key}' has an empty value; no entity to attach")
        out[(EntityId(ns, pair.value), FeatureId(FeatureKind.KV, pair.key))] += 1
        return
    entity, sep, attribute = pair.key.partition(COMPOSITE_KEY_SEPARATOR)
    if not sep or not entity or not attribute:
        raise RecordError("KvPair", f"composite key '{pair.key}' is not 'entity/attribute'")
    if attribute.startswith(DISPATCHER_PREFIX):
        name = attribute[len(DISPATCHER_PREFIX):]
        if not name or not pair.value:
            raise RecordError("KvPair", f"dispatcher key '{pair.key}' needs a name and a target")
        _dispatch(out, ns, entity, name, pair.value)
        return
    out[(EntityId(ns, entity), FeatureId(FeatureKind.ATTR, attribute, pair.value))] += 1


def _map_wide(cell: WideCell, ns: str, out: Counter) -> None:
    feature = FeatureId(FeatureKind.CELL, f"{cell.family}:{cell.qualifier}")
    out[(EntityId(ns, cell.row), feature)] += 1


def _map_doc(doc: Document, ns: str, out: Counter) -> None:
    entity = EntityId(ns, doc.id)
    for name, value in doc.attrs:
        out[(entity, FeatureId(FeatureKind.ATTR, name, value))] += 1
    for name, target in doc.dispatchers:
        _dispatch(out, ns, doc.id, name, target)


def _map_graph(graph: GraphData, ns: str, out: Counter) -> None:
    for parent, label, child in graph.arcs:
        out[(EntityId(ns, parent), FeatureId(FeatureKind.ARC, label, child))] += 1
        out[(EntityId(ns, child), FeatureId(FeatureKind.ARC_IN, label, parent))] += 1
    for node, value in graph.values.items():
        out[(EntityId(ns, node), FeatureId(FeatureKind.VALUE, "", value))] += 1
    if graph.root is not None:
        out[(EntityId(ns, graph.root), FeatureId(FeatureKind.VALUE, ROOT_FEATURE_KEY))] += 1


def _map_rdf(triple: RdfTriple, ns: str, out: Counter) -> None:
    subject = EntityId(ns, triple.subject)
    if triple.literal:
        out[(subject, FeatureId(FeatureKind.ATTR, triple.predicate, triple.object))] += 1
        return
    out[(subject, FeatureId(FeatureKind.ARC, triple.predicate, triple.object))] += 1
    out[(EntityId(ns, triple.object), FeatureId(FeatureKind.ARC_IN, triple.predicate, triple.subject))] += 1


def _accumulate(record: CarrierRecord, ns: str, kv_mode: KvMode, out: Counter) -> None:
    if isinstance(record, KvPair):
        record.validate()
        _map_kv(record, ns, kv_mode, out)
    elif isinstance(record, WideCell):
        record.validate()
        _map_wide(record, ns, out)
    elif isinstance(record, Document):
        record.validate()
        _map_doc(record, ns, out)
    elif isinstance(record, GraphData):
        record.validate()
        _map_graph(record, ns, out)
    elif isinstance(record, RdfTriple):
        record.validate()
        _map_rdf(record, ns, out)
    else:
        raise RecordError(type(record).__name__, "not a carrier record")


def _sorted(counts: Dict[_Pair, int]) -> List[Association]:
    return [Association(e, f, n)
            for (e, f), n in sorted(counts.items(), key=lambda item: (item[0][0].canonical, item[0][1].canonical))]


def map_to_associations(record: CarrierRecord, source: SourceDescriptor,
                        namespace: Optional[str] = None,
                        kv_mode: KvMode = KvMode.LITERAL) -> List[Association]:
    """Deterministic association list for one record, sorted canonically"""
    out: Counter = Counter()
    _accumulate(record, namespace or source.name, kv_mode, out)
    return _sorted(out)


def latest_versions(cells: Iterable[WideCell]) -> List[WideCell]:
    """Keep only the newest timestamp of every (row, family, qualifier)"""
    newest: Dict[Tuple[str, str, str], WideCell] = {}
    for cell in cells:
        kept = newest.get(cell.column)
        if kept is None or cell.timestamp > kept.timestamp:
            newest[cell.column] = cell
    return [newest[column] for column in sorted(newest)]


def map_batch(records: Iterable[CarrierRecord], source: SourceDescriptor,
              namespace: Optional[str] = None, kv_mode: KvMode = KvMode.LITERAL,
              latest_only: bool = False) -> List[Association]:
    """Map many records and merge equal pairs; wide cells may be cut to their latest version"""
    records = list(records)
    if latest_only:
        cells = [r for r in records if isinstance(r, WideCell)]
        records = [r for r in records if not isinstance(r, WideCell)] + latest_versions(cells)
    out: Counter = Counter()
    ns = namespace or source.name
    for record in records:
        _accumulate(record, ns, kv_mode, out)
    return _sorted(out)
