"""
Carrier records for efgrid: typed in-memory forms of the four NoSQL data models
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple, Union

from src.config.settings import BLANK_NODE_PREFIX
from src.models.errors import RecordError

MAX_TIMESTAMP = 2 ** 63 - 1


@dataclass(frozen=True)
class KvPair:
    """Key-value carrier pair: the key plays f, the value plays e"""
    key: str
    value: str

    def validate(self) -> None:
        if not self.key:
            raise RecordError("KvPair", "key must not be empty")


@dataclass(frozen=True)
class WideCell:
    """One timestamped version of a wide-column cell <r, c, t>"""
    row: str
    family: str
    qualifier: str
    timestamp: int
    value: str = ""

    @property
    def column(self) -> Tuple[str, str, str]:
        """(row, family, qualifier); versions of one cell share it"""
        return (self.row, self.family, self.qualifier)

    @property
    def version_key(self) -> Tuple[str, str, str, int]:
        return (self.row, self.family, self.qualifier, self.timestamp)

    def validate(self) -> None:
        if not self.row:
            raise RecordError("WideCell", "row key must not be empty")
        if ":" in self.family:
            raise RecordError("WideCell", f"column family '{self.family}' must not contain ':'")
        if not 0 <= self.timestamp <= MAX_TIMESTAMP:
            raise RecordError("WideCell", f"timestamp {self.timestamp} outside 0..2^63-1")


@dataclass(frozen=True)
class ColumnFamily:
    """Qualifiers stored under one family name"""
    name: str
    qualifiers: FrozenSet[str] = frozenset()


@dataclass(frozen=True)
class Document:
    """Document carrier: id f_0, attributes (f_i, e_i) and dispatchers (name, d_i)"""
    id: str
    attrs: Tuple[Tuple[str, str], ...] = ()
    dispatchers: Tuple[Tuple[str, str], ...] = ()

    def validate(self) -> None:
        if not self.id:
            raise RecordError("Document", "document id must not be empty")
        for name, target in self.dispatchers:
            if not target:
                raise RecordError("Document", f"dispatcher '{name}' has an empty target")


@dataclass(frozen=True)
class GraphData:
    """Graph carrier <ID, A, z, r>: nodes, labelled arcs, node values and a root"""
    nodes: FrozenSet[str]
    root: Optional[str] = None
    arcs: Tuple[Tuple[str, str, str], ...] = ()
    values: Dict[str, str] = field(default_factory=dict, hash=False)

    def validate(self) -> None:
        if self.root is not None and self.root not in self.nodes:
            raise RecordError("GraphData", f"root '{self.root}' is not a node")
        for parent, label, child in self.arcs:
            if parent not in self.nodes or child not in self.nodes:
                raise RecordError("GraphData", f"arc ({parent}, {label}, {child}) has an unknown endpoint")
        for node in self.values:
            if node not in self.nodes:
                raise RecordError("GraphData", f"value given for unknown node '{node}'")


@dataclass(frozen=True)
class RdfTriple:
    """RDF statement subject-predicate-object; literal objects are flagged"""
    subject: str
    predicate: str
    object: str
    literal: bool = False

    @property
    def is_key(self) -> bool:
        """True when the triple holds no blank node"""
        terms = [self.subject] if self.literal else [self.subject, self.object]
        return not any(term.startswith(BLANK_NODE_PREFIX) for term in terms)

    def validate(self) -> None:
        if not self.subject or not self.predicate:
            raise RecordError("RdfTriple", "subject and predicate must be resources")
        if self.predicate.startswith(BLANK_NODE_PREFIX):
            raise RecordError("RdfTriple", "predicate must not be a blank node")
        if not self.object:
            raise RecordError("RdfTriple", "object must not be empty")


CarrierRecord = Union[KvPair, WideCell, Document, GraphData, RdfTriple]
