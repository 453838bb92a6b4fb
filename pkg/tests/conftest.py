"""
Shared fixtures and independent oracles for the efgrid test suite

The oracles re-derive importance, vectors and distances from plain dicts with
nothing but the math module, so they share no code with src.core.metrics.
"""

import math
from pathlib import Path
from typing import Dict, Iterable, Mapping

import pytest

from src.models.identifiers import EntityId, FeatureId, FeatureKind
from src.models.store import AssociationStore, SourceKind

FIXTURES = Path(__file__).parent / "fixtures"

Counts = Mapping[str, Mapping[str, int]]


def ent(local: str, namespace: str = "t") -> EntityId:
    return EntityId(namespace, local)


def feat(key: str, value: str = "", kind: FeatureKind = FeatureKind.ATTR) -> FeatureId:
    return FeatureId(kind, key, value)


def build_store(counts: Counts, frozen: bool = True) -> AssociationStore:
    """Store from {entity local: {feature key: n}}"""
    store = AssociationStore()
    for entity, features in counts.items():
        for feature, n in features.items():
            store.add_association(ent(entity), feat(feature), n)
    if frozen:
        store.freeze()
    return store


def build_source_store(coverage: Mapping[str, Mapping[str, int]]) -> AssociationStore:
    """Frozen store whose sources cover entities {source: {entity local: count}}"""
    store = AssociationStore()
    for name, entities in coverage.items():
        store.register_source(name, SourceKind.KV)
        for entity, n in entities.items():
            store.add_association(ent(entity), feat("from", name), n, source=name)
    return store.freeze()


# -- oracles -------------------------------------------------------------------

def oracle_importance(n: int, e_size: int, ef_size: int) -> float:
    return (1 + math.log2(n)) * math.log2(e_size / ef_size)


def oracle_vectors(counts: Counts) -> Dict[str, Dict[str, float]]:
    """V(e,f) for every entity of a {entity: {feature: n}} table"""
    e_size = len(counts)
    support: Dict[str, int] = {}
    for features in counts.values():
        for feature in features:
            support[feature] = support.get(feature, 0) + 1
    vectors = {}
    for entity, features in counts.items():
        raw = {f: oracle_importance(n, e_size, support[f]) for f, n in features.items()}
        norm = math.sqrt(sum(v * v for v in raw.values()))
        vectors[entity] = {f: (v / norm if norm else 0.0) for f, v in raw.items()}
    return vectors


def oracle_distance(v1: Mapping[str, float], v2: Mapping[str, float]) -> tuple:
    """(raw, normalized) by direct summation over every coordinate"""
    keys = set(v1) | set(v2)
    raw = sum(abs(v1.get(k, 0.0) - v2.get(k, 0.0)) for k in keys)
    bound = sum(max(v1.get(k, 0.0), v2.get(k, 0.0)) for k in keys)
    return raw, (raw / bound if bound else 0.0)


def by_key(weights: Mapping[FeatureId, float]) -> Dict[str, float]:
    """Re-key a vector by attr feature key, to compare with oracle output"""
    return {feature.key: w for feature, w in weights.items()}


def close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# -- fixtures ------------------------------------------------------------------

@pytest.fixture
def write_file(tmp_path):
    """Write lines to a file under tmp_path and return its path"""
    def _write(name: str, lines: Iterable[str]) -> Path:
        path = tmp_path / name
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def three_entities() -> AssociationStore:
    """d1 shares 'a' with d2, d2 shares 'b' with d3"""
    return build_store({
        "d1": {"a": 2, "x": 1, "y": 4},
        "d2": {"a": 1, "b": 1},
        "d3": {"b": 3, "z": 1},
    })


@pytest.fixture
def catalog_docs() -> Path:
    return FIXTURES / "catalog_docs.jsonl"


@pytest.fixture
def catalog_kv() -> Path:
    return FIXTURES / "catalog_kv.tsv"
