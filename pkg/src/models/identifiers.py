"""
Entity and feature identifiers for efgrid

Both identifiers have a canonical string form that is unique, deterministic
and safe to write into a TSV snapshot: backslash, TAB and newline are escaped
as \\\\, \\t and \\n.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property, total_ordering
from typing import Tuple

from src.models.errors import RecordError

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r", "=": "=", "/": "/", ":": ":"}


def escape(text: str, extra: str = "") -> str:
    """Escape a component for its canonical form; `extra` characters get a backslash"""
    out = []
    for char in text:
        if char in _ESCAPES:
            out.append(_ESCAPES[char])
        elif char in extra:
            out.append("\\" + char)
        else:
            out.append(char)
    return "".join(out)


def unescape(text: str) -> str:
    """Inverse of escape()"""
    if "\\" not in text:
        return text
    out = []
    chars = iter(text)
    for char in chars:
        if char != "\\":
            out.append(char)
            continue
        nxt = next(chars, None)
        if nxt is None or nxt not in _UNESCAPES:
            raise ValueError(f"bad escape sequence in '{text}'")
        out.append(_UNESCAPES[nxt])
    return "".join(out)


def split_unescaped(text: str, separator: str) -> Tuple[str, str]:
    """Split at the first separator not preceded by an escaping backslash"""
    i = 0
    while i < len(text):
        char = text[i]
        if char == "\\":
            i += 2
            continue
        if char == separator:
            return text[:i], text[i + 1:]
        i += 1
    raise ValueError(f"missing '{separator}' in '{text}'")


@total_ordering
@dataclass(frozen=True)
class EntityId:
    """An entity e, namespaced by the source it came from (or 'global')"""
    namespace: str
    local: str

    def __post_init__(self):
        if not self.namespace:
            raise RecordError("EntityId", "namespace must not be empty")
        if "/" in self.namespace:
            raise RecordError("EntityId", f"namespace '{self.namespace}' must not contain '/'")
        if not self.local:
            raise RecordError("EntityId", "local part must not be empty")

    @cached_property
    def canonical(self) -> str:
        return f"{escape(self.namespace)}/{escape(self.local)}"

    @classmethod
    def parse(cls, canonical: str) -> "EntityId":
        """Build an EntityId from its canonical 'namespace/local' form"""
        namespace, sep, local = canonical.partition("/")
        if not sep:
            raise ValueError(f"entity '{canonical}' is not in namespace/local form")
        return cls(unescape(namespace), unescape(local))

    def __lt__(self, other: "EntityId") -> bool:
        if not isinstance(other, EntityId):
            return NotImplemented
        return self.canonical < other.canonical

    def __str__(self) -> str:
        return self.canonical


class FeatureKind(str, Enum):
    """Feature kinds; the '-in' kinds carry the inverse side of a link"""
    ATTR = "attr"
    REF = "ref"
    REF_IN = "ref-in"
    CELL = "cell"
    ARC = "arc"
    ARC_IN = "arc-in"
    VALUE = "value"
    KV = "kv"
    MENTION = "mention"


@total_ordering
@dataclass(frozen=True)
class FeatureId:
    """A feature f; identity is global across sources unless a query scopes it to one"""
    kind: FeatureKind
    key: str
    value: str = ""
    scope: str = ""

    @cached_property
    def canonical(self) -> str:
        head = self.kind.value
        if self.scope:
            head += f"@{escape(self.scope, extra=':')}"
        return f"{head}:{escape(self.key, extra='=')}={escape(self.value)}"

    @classmethod
    def parse(cls, canonical: str) -> "FeatureId":
        """Build a FeatureId from its canonical 'kind[@scope]:key=value' form"""
        try:
            head, rest = split_unescaped(canonical, ":")
        except ValueError:
            raise ValueError(f"feature '{canonical}' is not in kind:key=value form") from None
        kind, _, scope = head.partition("@")
        try:
            feature_kind = FeatureKind(kind)
        except ValueError:
            raise ValueError(f"unknown feature kind '{kind}'") from None
        key, value = split_unescaped(rest, "=")
        return cls(feature_kind, unescape(key), unescape(value), unescape(scope))

    def __lt__(self, other: "FeatureId") -> bool:
        if not isinstance(other, FeatureId):
            return NotImplemented
        return self.canonical < other.canonical

    def __str__(self) -> str:
        return self.canonical
