"""
Association store and source registry for efgrid
"""

import logging
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Set, Tuple

from src.models.errors import (
    SourceKindMismatchError,
    StoreFrozenError,
    UnknownEntityError,
    UnknownSourceError,
)
from src.models.identifiers import EntityId, FeatureId

logger = logging.getLogger(__name__)


class SourceKind(str, Enum):
    """Carrier kind of a registered source"""
    KV = "kv"
    WIDE = "wide"
    DOC = "doc"
    RDF = "rdf"
    GRAPH = "graph"


@dataclass
class SourceDescriptor:
    """A registered data source"""
    name: str
    kind: SourceKind
    records_ingested: int = 0
    associations_added: int = 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert source to dictionary; this is also the field set of a snapshot source line"""
        data = asdict(self)
        data["kind"] = self.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SourceDescriptor":
        """Create source from dictionary"""
        return cls(
            name=data["name"],
            kind=SourceKind(data["kind"]),
            records_ingested=int(data.get("records_ingested", 0)),
            associations_added=int(data.get("associations_added", 0)),
        )


class AssociationStore:
    """Sparse counts n(e,f) with both inverted indexes e(f) and f(e)"""

    def __init__(self):
        self._counts: Dict[Tuple[EntityId, FeatureId], int] = {}
        self._by_feature: Dict[FeatureId, Set[EntityId]] = defaultdict(set)
        self._by_entity: Dict[EntityId, Set[FeatureId]] = defaultdict(set)
        self._sources: Dict[str, SourceDescriptor] = {}
        self._origins: Dict[str, Counter] = {}
        self._aliases: Dict[EntityId, EntityId] = {}
        self._frozen: bool = False

    # -- mutation ---------------------------------------------------------

    def _check_open(self) -> None:
        if self._frozen:
            raise StoreFrozenError("store is frozen; no further ingestion is accepted")

    def add_association(self, entity: EntityId, feature: FeatureId, delta: int = 1,
                        source: Optional[str] = None) -> int:
        """Add delta to n(e,f) and return the updated count"""
        self._check_open()
        if isinstance(delta, bool) or not isinstance(delta, int) or delta < 1:
            raise ValueError(f"delta must be a positive integer, got {delta!r}")
        entity = self.resolve(entity)
        key = (entity, feature)
        count = self._counts.get(key, 0) + delta
        self._counts[key] = count
        self._by_feature[feature].add(entity)
        self._by_entity[entity].add(feature)
        if source is not None:
            if source not in self._sources:
                raise UnknownSourceError(source)
            self._origins[source][key] += delta
            self._sources[source].associations_added += delta
        return count

    def register_source(self, name: str, kind: SourceKind) -> SourceDescriptor:
        """Register a source, or return it when already known with the same kind"""
        self._check_open()
        if not name:
            raise ValueError("source name must not be empty")
        existing = self._sources.get(name)
        if existing is not None:
            if existing.kind != kind:
                raise SourceKindMismatchError(
                    f"source '{name}' is registered as {existing.kind.value}, not {kind.value}")
            return existing
        descriptor = SourceDescriptor(name=name, kind=kind)
        self._sources[name] = descriptor
        self._origins[name] = Counter()
        logger.debug("registered source %s (%s)", name, kind.value)
        return descriptor

    def add_alias(self, alias: EntityId, target: EntityId) -> None:
        """Merge `alias` into `target` for every association added from now on"""
        self._check_open()
        if self.resolve(target) == alias:
            raise ValueError(f"alias {alias} -> {target} would form a cycle")
        if alias in self._by_entity:
            raise ValueError(f"entity {alias} already has associations and cannot become an alias")
        self._aliases[alias] = target

    def restore_source(self, descriptor: SourceDescriptor,
                       origins: Dict[Tuple[EntityId, FeatureId], int]) -> None:
        """Reinstate a source with its counters and per-pair contributions, as read from a snapshot"""
        self._check_open()
        if descriptor.name in self._sources:
            raise ValueError(f"source '{descriptor.name}' restored twice")
        self._sources[descriptor.name] = descriptor
        self._origins[descriptor.name] = Counter(origins)

    def resolve(self, entity: EntityId) -> EntityId:
        """Follow the alias table to the entity that stores associations"""
        seen = set()
        while entity in self._aliases:
            if entity in seen:
                raise ValueError(f"alias cycle through {entity}")
            seen.add(entity)
            entity = self._aliases[entity]
        return entity

    def freeze(self) -> "AssociationStore":
        """Make the store immutable; idempotent"""
        if not self._frozen:
            self._frozen = True
            logger.info("store frozen: %d entities, %d features, %d pairs", *self.cardinalities())
        return self

    # -- queries ----------------------------------------------------------

    @property
    def frozen(self) -> bool:
        return self._frozen

    def count(self, entity: EntityId, feature: FeatureId) -> int:
        """n(e,f), 0 for absent pairs"""
        return self._counts.get((entity, feature), 0)

    def entities_of(self, feature: FeatureId) -> Set[EntityId]:
        """e(f): every entity with a positive count for f"""
        return set(self._by_feature.get(feature, ()))

    def features_of(self, entity: EntityId) -> Set[FeatureId]:
        """f(e): every feature with a positive count for e"""
        return set(self._by_entity.get(entity, ()))

    def feature_support(self, feature: FeatureId) -> int:
        """|e(f)|"""
        return len(self._by_feature.get(feature, ()))

    def cardinalities(self) -> Tuple[int, int, int]:
        """(|E|, |F|, number of stored pairs)"""
        return len(self._by_entity), len(self._by_feature), len(self._counts)

    def has_entity(self, entity: EntityId) -> bool:
        return entity in self._by_entity

    def require_entity(self, entity: EntityId) -> EntityId:
        if entity not in self._by_entity:
            raise UnknownEntityError(entity.canonical)
        return entity

    def entities(self) -> List[EntityId]:
        """All entities in canonical order"""
        return sorted(self._by_entity)

    def features(self) -> List[FeatureId]:
        """All features in canonical order"""
        return sorted(self._by_feature)

    def associations(self) -> Iterator[Tuple[EntityId, FeatureId, int]]:
        """Every stored (e, f, n) sorted by canonical entity then feature"""
        for entity in self.entities():
            for feature in sorted(self._by_entity[entity]):
                yield entity, feature, self._counts[(entity, feature)]

    def entity_counts(self, entity: EntityId) -> Dict[FeatureId, int]:
        """Feature -> n(e,f) over the support of e"""
        return {feature: self._counts[(entity, feature)] for feature in self._by_entity.get(entity, ())}

    # -- sources ----------------------------------------------------------

    def sources(self) -> List[SourceDescriptor]:
        """Registered sources sorted by name"""
        return [self._sources[name] for name in sorted(self._sources)]

    def get_source(self, name: str) -> SourceDescriptor:
        try:
            return self._sources[name]
        except KeyError:
            raise UnknownSourceError(name) from None

    def origins(self, source: str) -> Dict[Tuple[EntityId, FeatureId], int]:
        """(entity, feature) -> the part of n(e,f) this source contributed"""
        self.get_source(source)
        return dict(self._origins[source])

    def coverage(self, source: str) -> Dict[EntityId, int]:
        """Entity -> number of associations the source contributed to it"""
        covered: Counter = Counter()
        for (entity, _), count in self.origins(source).items():
            covered[entity] += count
        return dict(covered)

    def aliases(self) -> Dict[EntityId, EntityId]:
        return dict(self._aliases)

    # -- consistency ------------------------------------------------------

    def check_consistency(self) -> None:
        """Full scan of the index invariants; raises AssertionError on violation"""
        for (entity, feature), count in self._counts.items():
            if count < 1:
                raise AssertionError(f"non-positive count for ({entity}, {feature})")
            if entity not in self._by_feature.get(feature, ()):
                raise AssertionError(f"{entity} missing from e({feature})")
            if feature not in self._by_entity.get(entity, ()):
                raise AssertionError(f"{feature} missing from f({entity})")
        indexed = sum(len(entities) for entities in self._by_feature.values())
        if indexed != len(self._counts) or sum(len(f) for f in self._by_entity.values()) != indexed:
            raise AssertionError("inverted indexes hold pairs absent from counts")
        sourced: Counter = Counter()
        for origins in self._origins.values():
            sourced.update(origins)
        for (entity, feature), count in sourced.items():
            if count > self._counts.get((entity, feature), 0):
                raise AssertionError(f"sources contribute more than n({entity}, {feature})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AssociationStore):
            return NotImplemented
        return (self._counts == other._counts
                and {n: s.to_dict() for n, s in self._sources.items()}
                == {n: s.to_dict() for n, s in other._sources.items()}
                and {n: +c for n, c in self._origins.items()} == {n: +c for n, c in other._origins.items()}
                and self._aliases == other._aliases)

    __hash__ = object.__hash__
