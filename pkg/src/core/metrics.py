"""
Information metrics over a frozen association store

importance I(e,f) = (1 + log2 n(e,f)) * log2(|E| / |e(f)|)
weight     V(e,f) = I(e,f) / sqrt(sum over f(e) of I(e,g)^2)
distance   d(e1,e2) = sum |V(e1,f) - V(e2,f)|, normalized by sum max(V(e1,f), V(e2,f))
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple, Union
from weakref import WeakKeyDictionary

import numpy as np
from scipy import sparse

from src.config.settings import META_NAMESPACE
from src.core.views import QueryView, apply_view
from src.models.identifiers import EntityId, FeatureId, FeatureKind
from src.models.store import AssociationStore, SourceDescriptor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImportanceValue:
    """Information carried by one association, in bits"""
    bits: float

    def __float__(self) -> float:
        return self.bits


@dataclass(frozen=True)
class EntityVector:
    """Normalized weights of one entity; unit L2 norm or all zero"""
    owner: EntityId
    weights: Dict[FeatureId, float] = field(default_factory=dict, hash=False)

    def weight(self, feature: FeatureId) -> float:
        return self.weights.get(feature, 0.0)

    @property
    def is_zero(self) -> bool:
        return not any(self.weights.values())

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights.values()))


@dataclass(frozen=True)
class DistanceResult:
    raw: float
    normalized: float

    def pick(self, use_normalized: bool) -> float:
        return self.normalized if use_normalized else self.raw


# Vectors and meta stores are derived once per frozen store.
_VECTORS: "WeakKeyDictionary[AssociationStore, Dict[EntityId, EntityVector]]" = WeakKeyDictionary()
_META_STORES: "WeakKeyDictionary[AssociationStore, AssociationStore]" = WeakKeyDictionary()


def info_bits(n: int) -> float:
    """Binary questions needed to single out one of n alternatives"""
    if n < 1:
        raise ValueError(f"information is defined for n >= 1, got {n}")
    return math.log2(n)


def importance_bits(n_ef: int, e_size: int, ef_size: int) -> float:
    if n_ef < 1:
        raise ValueError(f"n(e,f) must be >= 1 (absent associations carry no importance), got {n_ef}")
    if ef_size < 1 or ef_size > e_size:
        raise ValueError(f"|e(f)| must lie in 1..|E|, got |e(f)|={ef_size}, |E|={e_size}")
    if ef_size == e_size:
        return 0.0
    return (1.0 + math.log2(n_ef)) * math.log2(e_size / ef_size)


def importance(n_ef: int, e_size: int, ef_size: int) -> ImportanceValue:
    """Importance of one present association"""
    return ImportanceValue(importance_bits(n_ef, e_size, ef_size))


def normalize(owner: EntityId, importances: Mapping[FeatureId, float]) -> EntityVector:
    """Cosine-normalize importances; all-zero input gives the all-zero vector"""
    features = sorted(importances)
    values = np.array([importances[f] for f in features], dtype=np.float64)
    norm = float(np.linalg.norm(values)) if len(values) else 0.0
    if norm == 0.0:
        return EntityVector(owner, {f: 0.0 for f in features})
    return EntityVector(owner, {f: float(v) for f, v in zip(features, values / norm)})


def feature_importances(entity: EntityId, store: AssociationStore,
                        view: Optional[QueryView] = None) -> List[Tuple[FeatureId, ImportanceValue]]:
    """I(e,f) over the support of e, highest first, ties by canonical feature"""
    store = apply_view(store, view)
    store.require_entity(entity)
    e_size = store.cardinalities()[0]
    ranked = [(f, importance(n, e_size, store.feature_support(f)))
              for f, n in store.entity_counts(entity).items()]
    ranked.sort(key=lambda item: (-item[1].bits, item[0].canonical))
    return ranked


def entity_vector(entity: EntityId, store: AssociationStore, view: Optional[QueryView] = None) -> EntityVector:
    """Normalized weight vector V(e,.) of one entity"""
    store = apply_view(store, view)
    cache = _VECTORS.setdefault(store, {})
    vector = cache.get(entity)
    if vector is None:
        store.require_entity(entity)
        e_size = store.cardinalities()[0]
        importances = {f: importance_bits(n, e_size, store.feature_support(f))
                       for f, n in store.entity_counts(entity).items()}
        vector = normalize(entity, importances)
        cache[entity] = vector
    return vector


def max_diff_bound(a_max: float, b_max: float) -> float:
    """Largest |a - b| for 0 <= a <= a_max, 0 <= b <= b_max"""
    if a_max < 0 or b_max < 0:
        raise ValueError("upper limits must be nonnegative")
    return max(a_max, b_max)


def vector_distance(first: Mapping[FeatureId, float], second: Mapping[FeatureId, float]) -> DistanceResult:
    """L1 distance over the union of supports, normalized by the per-coordinate bound"""
    raw = 0.0
    bound = 0.0
    for feature in sorted(first.keys() | second.keys()):
        a = first.get(feature, 0.0)
        b = second.get(feature, 0.0)
        raw += abs(a - b)
        bound += max_diff_bound(a, b)
    normalized = raw / bound if bound > 0.0 else 0.0
    return DistanceResult(raw=raw, normalized=min(normalized, 1.0))


def distance(first: EntityId, second: EntityId, store: AssociationStore,
             view: Optional[QueryView] = None) -> DistanceResult:
    """Distance between two entities"""
    store = apply_view(store, view)
    return vector_distance(entity_vector(first, store).weights, entity_vector(second, store).weights)


def neighbors(entity: EntityId, k: int, store: AssociationStore, use_normalized: bool = True,
              view: Optional[QueryView] = None) -> List[Tuple[EntityId, DistanceResult]]:
    """The k nearest other entities, ascending, ties by canonical id"""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    store = apply_view(store, view)
    origin = entity_vector(entity, store).weights
    scored = []
    for other in store.entities():
        if other == entity:
            continue
        scored.append((other, vector_distance(origin, entity_vector(other, store).weights)))
    scored.sort(key=lambda item: (item[1].pick(use_normalized), item[0].canonical))
    return scored[:k]


def build_meta_store(store: AssociationStore) -> AssociationStore:
    """Recast every source as an entity whose features are the entities it mentions"""
    store = apply_view(store)
    meta = _META_STORES.get(store)
    if meta is None:
        meta = AssociationStore()
        for source in store.sources():
            owner = EntityId(META_NAMESPACE, source.name)
            for entity, count in sorted(store.coverage(source.name).items()):
                meta.add_association(owner, FeatureId(FeatureKind.MENTION, entity.canonical), count)
        meta.freeze()
        _META_STORES[store] = meta
    return meta


def _source_name(source: Union[str, SourceDescriptor]) -> str:
    return source.name if isinstance(source, SourceDescriptor) else source


def source_distance(first: Union[str, SourceDescriptor], second: Union[str, SourceDescriptor],
                    store: AssociationStore, view: Optional[QueryView] = None) -> DistanceResult:
    """Distance between two sources taken as meta-entities"""
    store = apply_view(store, view)
    meta = build_meta_store(store)
    vectors = []
    for source in (first, second):
        name = _source_name(source)
        store.get_source(name)
        owner = EntityId(META_NAMESPACE, name)
        # a source without associations is the all-zero meta-entity
        vectors.append(entity_vector(owner, meta).weights if meta.has_entity(owner) else {})
    return vector_distance(vectors[0], vectors[1])


def weight_matrix(store: AssociationStore,
                  view: Optional[QueryView] = None) -> Tuple[List[EntityId], List[FeatureId], sparse.csr_matrix]:
    """Sparse V matrix: rows are entities, columns features, both canonically ordered"""
    store = apply_view(store, view)
    entities = store.entities()
    features = store.features()
    column = {feature: j for j, feature in enumerate(features)}
    rows: List[int] = []
    cols: List[int] = []
    data: List[float] = []
    for i, entity in enumerate(entities):
        for feature, weight in entity_vector(entity, store).weights.items():
            if weight > 0.0:
                rows.append(i)
                cols.append(column[feature])
                data.append(weight)
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=(len(entities), len(features)), dtype=np.float64)
    return entities, features, matrix


def distance_matrix(store: AssociationStore, normalized: bool = True,
                    view: Optional[QueryView] = None) -> Tuple[List[EntityId], np.ndarray]:
    """All-pairs distances; accumulates sum min(V1,V2) column by column over shared features"""
    entities, _, matrix = weight_matrix(store, view)
    n = len(entities)
    if n == 0:
        return entities, np.zeros((0, 0), dtype=np.float64)
    totals = np.asarray(matrix.sum(axis=1)).ravel()
    shared = np.zeros((n, n), dtype=np.float64)
    by_column = matrix.tocsc()
    for j in range(by_column.shape[1]):
        start, end = by_column.indptr[j], by_column.indptr[j + 1]
        if end - start < 2:
            continue
        rows = by_column.indices[start:end]
        values = by_column.data[start:end]
        shared[np.ix_(rows, rows)] += np.minimum.outer(values, values)
    np.fill_diagonal(shared, totals)
    bound = totals[:, None] + totals[None, :] - shared
    raw = np.clip(bound - shared, 0.0, None)
    np.fill_diagonal(raw, 0.0)
    logger.debug("distance matrix over %d entities and %d features", n, matrix.shape[1])
    if not normalized:
        return entities, raw
    result = np.divide(raw, bound, out=np.zeros_like(raw), where=bound > 0.0)
    return entities, np.clip(result, 0.0, 1.0)
