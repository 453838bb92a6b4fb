"""
Freezing, snapshotting and reloading an association store

Snapshot layout, one record per line, every section sorted:

    efgrid-v1
    state<TAB>open                                   (working indexes only)
    source<TAB>name<TAB>kind<TAB>records<TAB>associations
    origin<TAB>source<TAB>entity<TAB>feature<TAB>count
    alias<TAB>alias-entity<TAB>target-entity
    entity<TAB>feature<TAB>count
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

from src.config.settings import FORMAT_VERSION, SNAPSHOT_ENCODING, SNAPSHOT_HEADER
from src.models.errors import SnapshotError, SnapshotVersionError, StoreNotFrozenError
from src.models.identifiers import EntityId, FeatureId, escape, unescape
from src.models.store import AssociationStore, SourceDescriptor

logger = logging.getLogger(__name__)

COUNT_PATTERN = re.compile(r"^[1-9][0-9]*$")
COUNTER_PATTERN = re.compile(r"^(?:0|[1-9][0-9]*)$")
HEADER_PATTERN = re.compile(r"^efgrid-v(\d+)$")
SOURCE_FIELDS = ("name", "kind", "records_ingested", "associations_added")


@dataclass
class IndexSnapshot:
    """Content of a snapshot file; every list sorted and free of duplicates"""
    format_version: int = FORMAT_VERSION
    sources: List[SourceDescriptor] = field(default_factory=list)
    origins: List[Tuple[str, str, str, int]] = field(default_factory=list)
    aliases: List[Tuple[str, str]] = field(default_factory=list)
    associations: List[Tuple[str, str, int]] = field(default_factory=list)
    frozen: bool = True


def freeze(store: AssociationStore) -> AssociationStore:
    """Make the store immutable and queryable; idempotent"""
    return store.freeze()


def build_snapshot(store: AssociationStore) -> IndexSnapshot:
    """Snapshot of the store content, independent of insertion order"""
    sources = store.sources()
    origins = sorted(
        (source.name, entity.canonical, feature.canonical, count)
        for source in sources
        for (entity, feature), count in store.origins(source.name).items()
    )
    aliases = sorted((alias.canonical, target.canonical) for alias, target in store.aliases().items())
    associations = [(e.canonical, f.canonical, n) for e, f, n in store.associations()]
    return IndexSnapshot(
        sources=sources,
        origins=origins,
        aliases=aliases,
        associations=associations,
        frozen=store.frozen,
    )


def render_snapshot(snapshot: IndexSnapshot) -> str:
    lines = [SNAPSHOT_HEADER]
    if not snapshot.frozen:
        lines.append("state\topen")
    for source in snapshot.sources:
        data = source.to_dict()
        data["name"] = escape(data["name"])
        lines.append("\t".join(["source"] + [str(data[name]) for name in SOURCE_FIELDS]))
    for name, entity, feature, count in snapshot.origins:
        lines.append(f"origin\t{escape(name)}\t{entity}\t{feature}\t{count}")
    for alias, target in snapshot.aliases:
        lines.append(f"alias\t{alias}\t{target}")
    for entity, feature, count in snapshot.associations:
        lines.append(f"{entity}\t{feature}\t{count}")
    return "\n".join(lines) + "\n"


def write_snapshot(store: AssociationStore, path: Union[str, Path]) -> int:
    """Write the store in any state; returns bytes written"""
    data = render_snapshot(build_snapshot(store)).encode(SNAPSHOT_ENCODING)
    Path(path).write_bytes(data)
    logger.info("wrote %d bytes to %s", len(data), path)
    return len(data)


def save(store: AssociationStore, path: Union[str, Path]) -> int:
    """Write a frozen store; returns bytes written"""
    if not store.frozen:
        raise StoreNotFrozenError("only a frozen store can be saved; call freeze() first")
    return write_snapshot(store, path)


def _count(text: str, number: int) -> int:
    if not COUNT_PATTERN.match(text):
        raise SnapshotError(f"count '{text}' is not a positive integer", number)
    return int(text)


def _counter(text: str, number: int) -> int:
    if not COUNTER_PATTERN.match(text):
        raise SnapshotError(f"counter '{text}' is not a nonnegative integer", number)
    return int(text)


def parse_snapshot(text: str) -> IndexSnapshot:
    """Parse snapshot text; raises SnapshotError with the offending line number"""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise SnapshotVersionError("empty snapshot: missing header", 1)
    header = HEADER_PATTERN.match(lines[0])
    if header is None:
        raise SnapshotVersionError(f"unknown header '{lines[0][:40]}'", 1)
    if int(header.group(1)) != FORMAT_VERSION:
        raise SnapshotVersionError(
            f"snapshot format version {header.group(1)} is not supported (expected {FORMAT_VERSION})", 1)

    snapshot = IndexSnapshot()
    seen_sources = set()
    seen_pairs = set()
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        tag = fields[0]
        try:
            if tag == "state":
                if fields != ["state", "open"] or number != 2:
                    raise SnapshotError("state line must read 'state<TAB>open' right after the header", number)
                snapshot.frozen = False
            elif tag == "source":
                if len(fields) != 5:
                    raise SnapshotError("source line needs 5 fields", number)
                name = unescape(fields[1])
                if name in seen_sources:
                    raise SnapshotError(f"source '{name}' listed twice", number)
                seen_sources.add(name)
                _counter(fields[3], number)
                _counter(fields[4], number)
                data = dict(zip(SOURCE_FIELDS, [name] + fields[2:]))
                snapshot.sources.append(SourceDescriptor.from_dict(data))
            elif tag == "origin":
                if len(fields) != 5:
                    raise SnapshotError("origin line needs 5 fields", number)
                EntityId.parse(fields[2])
                FeatureId.parse(fields[3])
                snapshot.origins.append((unescape(fields[1]), fields[2], fields[3], _count(fields[4], number)))
            elif tag == "alias":
                if len(fields) != 3:
                    raise SnapshotError("alias line needs 3 fields", number)
                EntityId.parse(fields[1])
                EntityId.parse(fields[2])
                snapshot.aliases.append((fields[1], fields[2]))
            else:
                if len(fields) != 3:
                    raise SnapshotError(f"association line needs 3 fields, got {len(fields)}", number)
                EntityId.parse(fields[0])
                FeatureId.parse(fields[1])
                pair = (fields[0], fields[1])
                if pair in seen_pairs:
                    raise SnapshotError(f"association {fields[0]} {fields[1]} listed twice", number)
                seen_pairs.add(pair)
                snapshot.associations.append((fields[0], fields[1], _count(fields[2], number)))
        except SnapshotError:
            raise
        except ValueError as e:
            raise SnapshotError(str(e), number) from None
    return snapshot


def restore(snapshot: IndexSnapshot) -> AssociationStore:
    """Rebuild an open store from a parsed snapshot"""
    store = AssociationStore()
    origins: Dict[str, Dict[Tuple[EntityId, FeatureId], int]] = {source.name: {} for source in snapshot.sources}
    sourced: Counter = Counter()
    for name, entity, feature, count in snapshot.origins:
        if name not in origins:
            raise SnapshotError(f"origin line for unknown source '{name}'")
        pair = (EntityId.parse(entity), FeatureId.parse(feature))
        origins[name][pair] = count
        sourced[pair] += count
    for source in snapshot.sources:
        store.restore_source(source, origins[source.name])
    for alias, target in snapshot.aliases:
        store.add_alias(EntityId.parse(alias), EntityId.parse(target))
    for entity, feature, count in snapshot.associations:
        store.add_association(EntityId.parse(entity), FeatureId.parse(feature), count)
    for (entity, feature), count in sourced.items():
        if count > store.count(entity, feature):
            raise SnapshotError(f"sources contribute {count} to {entity} {feature}, more than its count")
    return store


def load(path: Union[str, Path], freeze: bool = True) -> AssociationStore:
    """Read a snapshot; the result is frozen unless the file is an open working index and freeze is False"""
    raw = Path(path).read_bytes()
    try:
        text = raw.decode(SNAPSHOT_ENCODING)
    except UnicodeDecodeError as e:
        line = raw[:e.start].count(b"\n") + 1
        raise SnapshotError("invalid UTF-8", line) from None
    snapshot = parse_snapshot(text)
    store = restore(snapshot)
    if freeze or snapshot.frozen:
        store.freeze()
    logger.info("loaded %s: %d entities, %d features, %d pairs", path, *store.cardinalities())
    return store
