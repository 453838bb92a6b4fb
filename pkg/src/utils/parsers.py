"""
Line parsers for efgrid input files
"""

import json
import re
from typing import Any, List, Tuple, Union

from rdflib import BNode, Literal, URIRef
from rdflib.plugins.parsers.ntriples import ParseError, W3CNTriplesParser, unquote

from src.config.settings import BLANK_NODE_PREFIX, DISPATCHER_PREFIX, DOC_ID_FIELD, GRAPH_ROOT_DIRECTIVE
from src.models.carriers import MAX_TIMESTAMP, Document, KvPair, RdfTriple, WideCell
from src.models.errors import LineParseError

# N-Triples proper wants absolute IRIs; relative ones such as <s> are accepted here
RELATIVE_IRI_PATTERN = re.compile(r'<((?:[^<>"{}|^`\\\s]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>')
NODE_LABEL_PATTERN = re.compile(r'_:([A-Za-z0-9_][A-Za-z0-9_.\-]*)')
TIMESTAMP_PATTERN = re.compile(r'^-?[0-9]+$')


def _fields(line: str, expected: int, what: str) -> List[str]:
    fields = line.split("\t")
    if len(fields) != expected:
        raise LineParseError(f"{what} line needs {expected} TAB-separated fields, got {len(fields)}")
    return fields


def parse_kv(line: str) -> KvPair:
    """Parse 'key<TAB>value'"""
    key, value = _fields(line, 2, "key-value")
    if not key:
        raise LineParseError("empty key")
    return KvPair(key=key, value=value)


def parse_wide(line: str) -> WideCell:
    """Parse 'row<TAB>family<TAB>qualifier<TAB>timestamp<TAB>value'"""
    row, family, qualifier, stamp, value = _fields(line, 5, "wide-column")
    if not row:
        raise LineParseError("empty row key")
    if not TIMESTAMP_PATTERN.match(stamp):
        raise LineParseError(f"timestamp '{stamp}' is not a decimal integer")
    if ":" in family:
        raise LineParseError(f"column family '{family}' must not contain ':'")
    timestamp = int(stamp)
    if not 0 <= timestamp <= MAX_TIMESTAMP:
        raise LineParseError(f"timestamp {timestamp} is outside the 64-bit range 0..2^63-1")
    return WideCell(row=row, family=family, qualifier=qualifier, timestamp=timestamp, value=value)


def _utf8(text: str, what: str) -> str:
    """Reject text that cannot be written back as UTF-8, such as a lone surrogate from a \\u escape"""
    try:
        text.encode("utf-8")
    except UnicodeEncodeError as e:
        raise LineParseError(f"{what} holds an unpaired surrogate at position {e.start}") from None
    return text


def _reject_constant(name: str) -> Any:
    raise LineParseError(f"unsupported JSON constant {name}")


def _atomic_text(name: str, value: Any) -> str:
    if isinstance(value, (dict, list)):
        raise LineParseError(f"field '{name}' holds a nested value")
    if value is None:
        raise LineParseError(f"field '{name}' is null")
    if isinstance(value, str):
        return _utf8(value, f"field '{name}'")
    # numbers and booleans keep their JSON spelling
    return json.dumps(value)


def parse_doc(line: str) -> Document:
    """Parse one flat JSON object; '_id' names the document, '@name' fields are dispatchers"""
    try:
        pairs = json.loads(line, object_pairs_hook=list, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise LineParseError(f"invalid JSON: {e.msg} at column {e.colno}") from None
    if not isinstance(pairs, list) or not line.lstrip().startswith("{"):
        raise LineParseError("document line must be a JSON object")

    doc_id = None
    attrs: List[Tuple[str, str]] = []
    dispatchers: List[Tuple[str, str]] = []
    for name, value in pairs:
        _utf8(name, "field name")
        if name == DOC_ID_FIELD:
            if doc_id is not None:
                raise LineParseError(f"'{DOC_ID_FIELD}' given twice")
            if not isinstance(value, str) or not value:
                raise LineParseError(f"'{DOC_ID_FIELD}' must be a non-empty string")
            doc_id = _utf8(value, f"'{DOC_ID_FIELD}'")
        elif name.startswith(DISPATCHER_PREFIX):
            target = _atomic_text(name, value)
            if not isinstance(value, str) or not target:
                raise LineParseError(f"dispatcher '{name}' must hold a document id string")
            dispatchers.append((name[len(DISPATCHER_PREFIX):], target))
        else:
            attrs.append((name, _atomic_text(name, value)))
    if doc_id is None:
        raise LineParseError(f"missing '{DOC_ID_FIELD}'")
    return Document(id=doc_id, attrs=tuple(attrs), dispatchers=tuple(dispatchers))


class _TripleSink:
    """Collects the triples rdflib reads from one line"""

    def __init__(self):
        self.triples: List[Tuple[Any, Any, Any]] = []

    def triple(self, subject, predicate, obj) -> None:
        self.triples.append((subject, predicate, obj))


class _LineParser(W3CNTriplesParser):
    """rdflib's N-Triples reader with relative IRIs allowed and blank node labels kept as written"""

    def uriref(self) -> Union[URIRef, bool]:
        if self.peek("<"):
            return URIRef(unquote(self.eat(RELATIVE_IRI_PATTERN).group(1)))
        return False

    def nodeid(self, bnode_context=None) -> Union[BNode, bool]:
        if self.peek(BLANK_NODE_PREFIX):
            return BNode(self.eat(NODE_LABEL_PATTERN).group(1))
        return False


def _term(node: Union[URIRef, BNode]) -> str:
    if isinstance(node, BNode):
        return BLANK_NODE_PREFIX + str(node)
    return _utf8(str(node), "resource")


def parse_ntriples(line: str) -> RdfTriple:
    """Parse '<s> <p> <o> .' or '<s> <p> "literal" .'; blank nodes allowed as subject/object"""
    sink = _TripleSink()
    try:
        _LineParser(sink=sink).parsestring(line)
    except ParseError:
        if not line.rstrip().endswith("."):
            raise LineParseError("missing terminating '.'") from None
        raise LineParseError("malformed N-Triples term") from None
    if len(sink.triples) != 1:
        raise LineParseError("expected exactly one triple")
    subject, predicate, obj = sink.triples[0]
    if isinstance(obj, Literal):
        if obj.language or obj.datatype:
            raise LineParseError("language tags and datatypes are not supported")
        text = _utf8(str(obj), "literal")
        if not text:
            raise LineParseError("empty literal object")
        return RdfTriple(subject=_term(subject), predicate=_term(predicate), object=text, literal=True)
    return RdfTriple(subject=_term(subject), predicate=_term(predicate), object=_term(obj), literal=False)


def _node_name(text: str) -> str:
    if text.startswith("<") and text.endswith(">"):
        return text[1:-1]
    return text


def parse_node_value(line: str) -> Tuple[str, str]:
    """Parse 'node<TAB>value' (graph node value z(n) = v)"""
    node, value = _fields(line, 2, "node-value")
    node = _node_name(node)
    if not node:
        raise LineParseError("empty node identifier")
    return node, value


def parse_root(line: str) -> str:
    """Parse '@root<TAB>node'"""
    directive, node = _fields(line, 2, "root")
    if directive != GRAPH_ROOT_DIRECTIVE:
        raise LineParseError(f"expected '{GRAPH_ROOT_DIRECTIVE}' directive")
    node = _node_name(node)
    if not node:
        raise LineParseError("empty root node")
    return node
