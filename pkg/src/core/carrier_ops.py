"""
Read operations defined on the carrier models: key-value projection and
selection, column families, and the document node/relation operations.
"""

from enum import Enum
from typing import FrozenSet, List, NamedTuple, Sequence

from src.config.settings import COMPOSITE_KEY_SEPARATOR
from src.models.carriers import ColumnFamily, Document, KvPair, WideCell


class Axis(str, Enum):
    KEYS = "keys"
    VALUES = "values"


class SelectBy(str, Enum):
    KEY = "key"
    VALUE = "value"
    ANCESTOR = "ancestor"


def kv_project(pairs: Sequence[KvPair], axis: Axis) -> List[str]:
    """Projection: distinct keys (or values) in first-occurrence order"""
    picked = (pair.key if axis == Axis.KEYS else pair.value for pair in pairs)
    return list(dict.fromkeys(picked))


def key_ancestor(key: str) -> str:
    """Major part of a folded 'major/minor' key; the key itself when unfolded"""
    return key.split(COMPOSITE_KEY_SEPARATOR, 1)[0]


def kv_select(pairs: Sequence[KvPair], by: SelectBy, needle: str) -> List[KvPair]:
    """Selection: value by key, keys by value, or keys by ancestor"""
    if by == SelectBy.KEY:
        return [pair for pair in pairs if pair.key == needle]
    if by == SelectBy.VALUE:
        return [pair for pair in pairs if pair.value == needle]
    return [pair for pair in pairs
            if COMPOSITE_KEY_SEPARATOR in pair.key and key_ancestor(pair.key) == needle]


def family_of(cells: Sequence[WideCell], family_name: str) -> ColumnFamily:
    """The column family with every qualifier observed under that name"""
    qualifiers = frozenset(cell.qualifier for cell in cells if cell.family == family_name)
    return ColumnFamily(name=family_name, qualifiers=qualifiers)


class ElementNode(NamedTuple):
    """Node of a document tree; `index` keeps repeated names distinct"""
    role: str
    index: int
    name: str


def doc_element_nodes(doc: Document, collection: str) -> FrozenSet[ElementNode]:
    """Collection node, document node, and one node per attribute and dispatcher"""
    nodes = {
        ElementNode("collection", 0, collection),
        ElementNode("document", 0, doc.id),
    }
    offset = 1
    for i, (name, _) in enumerate(doc.attrs, start=offset):
        nodes.add(ElementNode("attr", i, name))
    offset += len(doc.attrs)
    for i, (name, _) in enumerate(doc.dispatchers, start=offset):
        nodes.add(ElementNode("dispatcher", i, name))
    return frozenset(nodes)


def doc_node_values(doc: Document, name: str) -> List[str]:
    """Values held under attributes named `name`, in document order"""
    return [value for attr, value in doc.attrs if attr == name]


class RelationKind(str, Enum):
    EE = "EE"  # element-element: document x collection
    EA = "EA"  # element-attribute
    ER = "ER"  # element-tag: dispatcher name x target
    ED = "ED"  # element-data: attribute x value


class Relation(NamedTuple):
    kind: RelationKind
    left: str
    right: str


def doc_relations(doc: Document, collection: str) -> List[Relation]:
    """EE, then EA/ED per attribute, then ER per dispatcher"""
    relations = [Relation(RelationKind.EE, doc.id, collection)]
    for name, value in doc.attrs:
        relations.append(Relation(RelationKind.EA, name, doc.id))
        relations.append(Relation(RelationKind.ED, name, value))
    for name, target in doc.dispatchers:
        relations.append(Relation(RelationKind.ER, name, target))
    return relations
