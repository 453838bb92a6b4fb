"""
Tests for freezing, saving and loading indexes
"""

import pytest

from src.core.index_store import (
    build_snapshot,
    freeze,
    load,
    parse_snapshot,
    render_snapshot,
    restore,
    save,
    write_snapshot,
)
from src.core.metrics import neighbors
from src.models.errors import SnapshotError, SnapshotVersionError, StoreFrozenError, StoreNotFrozenError
from src.models.identifiers import EntityId, FeatureId, FeatureKind
from src.models.store import AssociationStore, SourceKind
from tests.conftest import build_store, ent, feat


def sourced_store() -> AssociationStore:
    store = AssociationStore()
    store.register_source("books", SourceKind.DOC)
    store.register_source("web", SourceKind.WIDE)
    store.add_alias(ent("Bard"), ent("Shakespeare"))
    store.add_association(ent("Bard"), feat("wrote", "Hamlet"), 2, source="books")
    store.add_association(ent("Marlowe"), feat("wrote", "Faustus"), 1, source="books")
    store.add_association(ent("Marlowe"), FeatureId(FeatureKind.CELL, "tab\there"), 1, source="web")
    store.get_source("books").records_ingested = 2
    store.get_source("web").records_ingested = 1
    return store.freeze()


class TestFreeze:

    def test_empty_store(self):
        store = freeze(AssociationStore())
        assert store.frozen
        assert store.cardinalities()[0] == 0

    def test_ingest_after_freeze_is_rejected(self):
        store = freeze(AssociationStore())
        with pytest.raises(StoreFrozenError):
            store.register_source("late", SourceKind.KV)

    def test_double_freeze(self):
        store = freeze(AssociationStore())
        assert freeze(store) is store


class TestSave:

    def test_empty_store_is_header_only(self, tmp_path):
        path = tmp_path / "empty.idx"
        assert save(freeze(AssociationStore()), path) == len("efgrid-v1\n")
        assert path.read_text() == "efgrid-v1\n"

    def test_two_associations(self, tmp_path):
        path = tmp_path / "two.idx"
        save(build_store({"b": {"f": 1}, "a": {"g": 3}}), path)
        assert path.read_text().splitlines() == ["efgrid-v1", "t/a\tattr:g=\t3", "t/b\tattr:f=\t1"]

    def test_save_twice_is_byte_identical(self, tmp_path):
        store = sourced_store()
        save(store, tmp_path / "one.idx")
        save(store, tmp_path / "two.idx")
        assert (tmp_path / "one.idx").read_bytes() == (tmp_path / "two.idx").read_bytes()

    def test_open_store_cannot_be_saved(self, tmp_path):
        with pytest.raises(StoreNotFrozenError):
            save(AssociationStore(), tmp_path / "x.idx")

    def test_snapshot_sections(self):
        lines = render_snapshot(build_snapshot(sourced_store())).splitlines()
        assert lines == [
            "efgrid-v1",
            "source\tbooks\tdoc\t2\t3",
            "source\tweb\twide\t1\t1",
            "origin\tbooks\tt/Marlowe\tattr:wrote=Faustus\t1",
            "origin\tbooks\tt/Shakespeare\tattr:wrote=Hamlet\t2",
            "origin\tweb\tt/Marlowe\tcell:tab\\there=\t1",
            "alias\tt/Bard\tt/Shakespeare",
            "t/Marlowe\tattr:wrote=Faustus\t1",
            "t/Marlowe\tcell:tab\\there=\t1",
            "t/Shakespeare\tattr:wrote=Hamlet\t2",
        ]

    def test_insertion_order_is_irrelevant(self):
        first = build_store({"a": {"x": 1, "y": 2}, "b": {"x": 1}})
        second = build_store({"b": {"x": 1}, "a": {"y": 2, "x": 1}})
        assert render_snapshot(build_snapshot(first)) == render_snapshot(build_snapshot(second))


class TestLoad:

    def test_round_trip(self, tmp_path):
        store = sourced_store()
        save(store, tmp_path / "s.idx")
        loaded = load(tmp_path / "s.idx")
        assert loaded == store
        assert loaded.frozen
        loaded.check_consistency()
        save(loaded, tmp_path / "again.idx")
        assert (tmp_path / "s.idx").read_bytes() == (tmp_path / "again.idx").read_bytes()

    def test_round_trip_preserves_queries(self, tmp_path, three_entities):
        save(three_entities, tmp_path / "t.idx")
        loaded = load(tmp_path / "t.idx")
        for entity in three_entities.entities():
            assert neighbors(entity, 5, loaded) == neighbors(entity, 5, three_entities)

    def test_aliases_survive(self, tmp_path):
        save(sourced_store(), tmp_path / "s.idx")
        assert load(tmp_path / "s.idx").aliases() == {ent("Bard"): ent("Shakespeare")}

    def test_working_index_stays_open(self, tmp_path):
        store = AssociationStore()
        store.add_association(ent("a"), feat("f"), 1)
        write_snapshot(store, tmp_path / "w.idx")
        assert (tmp_path / "w.idx").read_text().splitlines()[1] == "state\topen"
        assert not load(tmp_path / "w.idx", freeze=False).frozen
        assert load(tmp_path / "w.idx").frozen

    def test_corrupted_count(self, tmp_path):
        path = tmp_path / "bad.idx"
        path.write_text("efgrid-v1\nt/a\tattr:f=\t1\nt/b\tattr:f=\tx1\n")
        with pytest.raises(SnapshotError) as info:
            load(path)
        assert info.value.line_number == 3

    def test_unknown_header(self, tmp_path):
        path = tmp_path / "other.idx"
        path.write_text("something-else\n")
        with pytest.raises(SnapshotVersionError):
            load(path)

    def test_future_version(self):
        with pytest.raises(SnapshotVersionError, match="version 2"):
            parse_snapshot("efgrid-v2\n")

    @pytest.mark.parametrize("text,line", [
        ("efgrid-v1\nt/a\tattr:f=\t1\nt/a\tattr:f=\t2\n", 3),
        ("efgrid-v1\nnoslash\tattr:f=\t1\n", 2),
        ("efgrid-v1\nt/a\tbogus:f=\t1\n", 2),
        ("efgrid-v1\nt/a\tattr:f=\t0\n", 2),
        ("efgrid-v1\nsource\ts\tkv\t1\n", 2),
        ("efgrid-v1\nsource\ts\tnosql\t1\t1\n", 2),
        ("efgrid-v1\nt/a\tattr:f=\t1\nstate\topen\n", 3),
    ])
    def test_malformed_lines(self, text, line):
        with pytest.raises(SnapshotError) as info:
            parse_snapshot(text)
        assert info.value.line_number == line

    def test_origins_survive(self, tmp_path):
        store = sourced_store()
        save(store, tmp_path / "s.idx")
        assert load(tmp_path / "s.idx").origins("web") == store.origins("web")

    @pytest.mark.parametrize("text,message", [
        ("efgrid-v1\norigin\tghost\tt/a\tattr:f=\t1\nt/a\tattr:f=\t1\n", "unknown source"),
        ("efgrid-v1\nsource\ts\tkv\t1\t2\norigin\ts\tt/a\tattr:f=\t2\nt/a\tattr:f=\t1\n", "more than its count"),
    ])
    def test_inconsistent_origins(self, text, message):
        with pytest.raises(SnapshotError, match=message):
            restore(parse_snapshot(text))

    def test_empty_file(self):
        with pytest.raises(SnapshotVersionError):
            parse_snapshot("")

    def test_loaded_entities(self, tmp_path):
        save(sourced_store(), tmp_path / "s.idx")
        loaded = load(tmp_path / "s.idx")
        assert EntityId("t", "Marlowe") in loaded.entities()
        assert loaded.coverage("books") == {ent("Marlowe"): 1, ent("Shakespeare"): 2}
