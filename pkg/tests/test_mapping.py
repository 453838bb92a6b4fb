"""
Tests for mapping carrier records into entity-feature associations
"""

from collections import Counter

import pytest
from hypothesis import given, strategies as st

from src.core.mapping import Association, KvMode, latest_versions, map_batch, map_to_associations
from src.models.carriers import Document, GraphData, KvPair, RdfTriple, WideCell
from src.models.errors import RecordError
from src.models.identifiers import EntityId, FeatureId, FeatureKind
from src.models.store import SourceDescriptor, SourceKind

SOURCE = SourceDescriptor("src", SourceKind.DOC)


def e(local: str) -> EntityId:
    return EntityId("src", local)


def f(kind: FeatureKind, key: str, value: str = "") -> FeatureId:
    return FeatureId(kind, key, value)


class TestKeyValueMapping:

    def test_literal_pair(self):
        assert map_to_associations(KvPair("color", "red"), SOURCE) == [
            Association(e("red"), f(FeatureKind.KV, "color"), 1)]

    def test_literal_pair_needs_a_value(self):
        with pytest.raises(RecordError):
            map_to_associations(KvPair("color", ""), SOURCE)

    def test_composite_attribute(self):
        got = map_to_associations(KvPair("d1/author", "Shakespeare"), SOURCE, kv_mode=KvMode.COMPOSITE)
        assert got == [Association(e("d1"), f(FeatureKind.ATTR, "author", "Shakespeare"), 1)]

    def test_composite_dispatcher(self):
        got = map_to_associations(KvPair("d1/@cites", "d2"), SOURCE, kv_mode=KvMode.COMPOSITE)
        assert got == [
            Association(e("d1"), f(FeatureKind.REF, "cites", "d2"), 1),
            Association(e("d2"), f(FeatureKind.REF_IN, "cites", "d1"), 1),
        ]

    @pytest.mark.parametrize("key", ["plain", "/attr", "entity/"])
    def test_malformed_composite_key(self, key):
        with pytest.raises(RecordError):
            map_to_associations(KvPair(key, "v"), SOURCE, kv_mode=KvMode.COMPOSITE)

    def test_namespace_override(self):
        got = map_to_associations(KvPair("color", "red"), SOURCE, namespace="global")
        assert got[0].entity == EntityId("global", "red")


class TestDocumentMapping:

    def test_attributes_and_dispatcher(self):
        doc = Document("d1", attrs=(("author", "Shakespeare"),), dispatchers=(("cites", "d2"),))
        assert map_to_associations(doc, SOURCE) == [
            Association(e("d1"), f(FeatureKind.ATTR, "author", "Shakespeare"), 1),
            Association(e("d1"), f(FeatureKind.REF, "cites", "d2"), 1),
            Association(e("d2"), f(FeatureKind.REF_IN, "cites", "d1"), 1),
        ]

    def test_repeated_attribute_counts(self):
        doc = Document("d1", attrs=(("tag", "x"), ("tag", "x")))
        assert map_to_associations(doc, SOURCE) == [Association(e("d1"), f(FeatureKind.ATTR, "tag", "x"), 2)]

    def test_document_and_composite_kv_agree(self):
        doc = Document("d1", attrs=(("a", "1"), ("b", "2")), dispatchers=(("next", "d2"),))
        pairs = [KvPair("d1/a", "1"), KvPair("d1/b", "2"), KvPair("d1/@next", "d2")]
        assert map_batch(pairs, SOURCE, kv_mode=KvMode.COMPOSITE) == map_to_associations(doc, SOURCE)


class TestWideMapping:

    def test_versions_are_counted(self):
        cells = [WideCell("com.cnn.www", "Contents", "html", 1, "<a>"),
                 WideCell("com.cnn.www", "Contents", "html", 2, "<b>")]
        assert map_batch(cells, SOURCE) == [
            Association(e("com.cnn.www"), f(FeatureKind.CELL, "Contents:html"), 2)]

    def test_latest_only(self):
        cells = [WideCell("r", "F", "q", 1, "old"), WideCell("r", "F", "q", 5, "new"),
                 WideCell("r", "F", "p", 2, "x")]
        assert [c.value for c in latest_versions(cells)] == ["x", "new"]
        got = map_batch(cells, SOURCE, latest_only=True)
        assert [a.count for a in got] == [1, 1]

    @given(st.lists(st.tuples(st.sampled_from("rs"), st.sampled_from("FG"), st.sampled_from("pq"),
                              st.integers(min_value=0, max_value=50)), max_size=20))
    def test_count_matches_grouped_versions(self, raw):
        """Property: count per cell equals the number of its versions"""
        cells = [WideCell(r, fam, q, t) for r, fam, q, t in raw]
        expected = Counter((c.row, f"{c.family}:{c.qualifier}") for c in cells)
        got = {(a.entity.local, a.feature.key): a.count for a in map_batch(cells, SOURCE)}
        assert got == dict(expected)


    def test_family_and_qualifier_cannot_collide(self):
        """A colon belongs to the qualifier, so (a, b:c) has a feature of its own"""
        with pytest.raises(RecordError):
            map_to_associations(WideCell("r", "a:b", "c", 1), SOURCE)
        (only,) = map_to_associations(WideCell("r", "a", "b:c", 1), SOURCE)
        assert only.feature == f(FeatureKind.CELL, "a:b:c")


class TestGraphMapping:

    def test_arcs_values_and_root(self):
        graph = GraphData(nodes=frozenset({"a", "b"}), root="a", arcs=(("a", "knows", "b"),), values={"b": "Bob"})
        assert map_to_associations(graph, SOURCE) == [
            Association(e("a"), f(FeatureKind.ARC, "knows", "b"), 1),
            Association(e("a"), f(FeatureKind.VALUE, "root"), 1),
            Association(e("b"), f(FeatureKind.ARC_IN, "knows", "a"), 1),
            Association(e("b"), f(FeatureKind.VALUE, "", "Bob"), 1),
        ]

    def test_invalid_graph(self):
        with pytest.raises(RecordError):
            map_to_associations(GraphData(nodes=frozenset({"a"}), root="z"), SOURCE)


class TestRdfMapping:

    def test_resource_object(self):
        assert map_to_associations(RdfTriple("s", "p", "o"), SOURCE) == [
            Association(e("o"), f(FeatureKind.ARC_IN, "p", "s"), 1),
            Association(e("s"), f(FeatureKind.ARC, "p", "o"), 1),
        ]

    def test_literal_object(self):
        assert map_to_associations(RdfTriple("s", "p", "lit", literal=True), SOURCE) == [
            Association(e("s"), f(FeatureKind.ATTR, "p", "lit"), 1)]

    def test_unknown_record_type(self):
        with pytest.raises(RecordError):
            map_to_associations("not a record", SOURCE)
