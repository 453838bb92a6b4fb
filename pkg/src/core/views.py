"""
Query-time views over a frozen association store

A view never changes what is stored. It derives a second frozen store that the
metrics run against:

    feature scope  global  features unify across sources (the stored form)
                   source  every feature is split per contributing source
    latest only            a wide-column cell counts once, not once per version
"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Optional
from weakref import WeakKeyDictionary

from src.models.errors import StoreNotFrozenError
from src.models.identifiers import FeatureId, FeatureKind
from src.models.store import AssociationStore

logger = logging.getLogger(__name__)


class FeatureScope(str, Enum):
    GLOBAL = "global"
    SOURCE = "source"


@dataclass(frozen=True)
class QueryView:
    """How counts are read when computing importance, vectors and distances"""
    scope: FeatureScope = FeatureScope.GLOBAL
    latest_only: bool = False

    @property
    def is_stored_form(self) -> bool:
        return self.scope == FeatureScope.GLOBAL and not self.latest_only

    def feature(self, feature: FeatureId, source: Optional[str]) -> FeatureId:
        if self.scope == FeatureScope.SOURCE and source is not None:
            return replace(feature, scope=source)
        return feature

    def count(self, feature: FeatureId, n: int) -> int:
        # one count per version, so the newest version alone is one count
        if self.latest_only and feature.kind == FeatureKind.CELL:
            return 1
        return n


STORED_FORM = QueryView()

_VIEWS: "WeakKeyDictionary[AssociationStore, Dict[QueryView, AssociationStore]]" = WeakKeyDictionary()


def _derive(store: AssociationStore, view: QueryView) -> AssociationStore:
    derived = AssociationStore()
    sourced: Counter = Counter()
    for source in store.sources():
        derived.register_source(source.name, source.kind)
        for (entity, feature), n in sorted(store.origins(source.name).items()):
            sourced[(entity, feature)] += n
            derived.add_association(entity, view.feature(feature, source.name), view.count(feature, n),
                                    source=source.name)
    # associations added without a source keep their stored feature
    for entity, feature, n in store.associations():
        rest = n - sourced.get((entity, feature), 0)
        if rest > 0:
            derived.add_association(entity, view.feature(feature, None), view.count(feature, rest))
    for source in store.sources():
        derived.get_source(source.name).records_ingested = source.records_ingested
    logger.debug("derived %s view: %d entities, %d features, %d pairs", view, *derived.cardinalities())
    return derived.freeze()


def apply_view(store: AssociationStore, view: Optional[QueryView] = None) -> AssociationStore:
    """The frozen store the metrics should read for `view`; the store itself for the stored form"""
    if not store.frozen:
        raise StoreNotFrozenError("metrics need a frozen store; call freeze() first")
    if view is None or view.is_stored_form:
        return store
    cache = _VIEWS.setdefault(store, {})
    derived = cache.get(view)
    if derived is None:
        derived = _derive(store, view)
        cache[view] = derived
    return derived
