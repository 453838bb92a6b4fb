"""
Tests for entity and feature identifiers
"""

import pytest
from hypothesis import given, strategies as st

from src.models.errors import RecordError
from src.models.identifiers import EntityId, FeatureId, FeatureKind, escape, split_unescaped, unescape

text = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=20)


class TestEscaping:

    def test_escapes_control_characters(self):
        assert escape("a\tb\nc\\d\re") == "a\\tb\\nc\\\\d\\re"

    def test_extra_characters_get_a_backslash(self):
        assert escape("k=v", extra="=") == "k\\=v"

    def test_bad_escape_is_rejected(self):
        with pytest.raises(ValueError):
            unescape("a\\q")

    def test_split_skips_escaped_separator(self):
        assert split_unescaped("a\\=b=c", "=") == ("a\\=b", "c")

    @given(text)
    def test_unescape_inverts_escape(self, value):
        """Property: unescape(escape(s)) == s"""
        assert unescape(escape(value, extra="=")) == value


class TestEntityId:

    def test_canonical_form(self):
        assert EntityId("books", "d1").canonical == "books/d1"

    def test_local_part_may_contain_slash(self):
        entity = EntityId.parse("web/com.cnn.www/index")
        assert entity == EntityId("web", "com.cnn.www/index")

    def test_ordering_is_lexicographic_on_canonical_form(self):
        ids = [EntityId("b", "1"), EntityId("a", "2"), EntityId("a", "10")]
        assert [e.canonical for e in sorted(ids)] == ["a/10", "a/2", "b/1"]

    @pytest.mark.parametrize("namespace,local", [("", "x"), ("a/b", "x"), ("ns", "")])
    def test_invalid_parts_are_rejected(self, namespace, local):
        with pytest.raises(RecordError):
            EntityId(namespace, local)

    def test_parse_requires_namespace(self):
        with pytest.raises(ValueError):
            EntityId.parse("no-namespace")

    @given(st.text(alphabet="abc\t\n", min_size=1, max_size=8), text.filter(bool))
    def test_parse_inverts_canonical(self, namespace, local):
        entity = EntityId(namespace, local)
        assert EntityId.parse(entity.canonical) == entity


class TestFeatureId:

    def test_canonical_form(self):
        assert FeatureId(FeatureKind.ATTR, "author", "Shakespeare").canonical == "attr:author=Shakespeare"
        assert FeatureId(FeatureKind.KV, "color").canonical == "kv:color="
        assert FeatureId(FeatureKind.CELL, "Contents:html").canonical == "cell:Contents:html="

    def test_equals_sign_in_key_is_escaped(self):
        feature = FeatureId(FeatureKind.ATTR, "a=b", "c=d")
        assert feature.canonical == "attr:a\\=b=c=d"
        assert FeatureId.parse(feature.canonical) == feature

    def test_unknown_kind_is_rejected(self):
        with pytest.raises(ValueError, match="unknown feature kind"):
            FeatureId.parse("colour:x=y")

    @given(st.sampled_from(list(FeatureKind)), text, text)
    def test_parse_inverts_canonical(self, kind, key, value):
        feature = FeatureId(kind, key, value)
        assert FeatureId.parse(feature.canonical) == feature

    def test_scoped_canonical_form(self):
        feature = FeatureId(FeatureKind.ATTR, "author", "Shakespeare", scope="books")
        assert feature.canonical == "attr@books:author=Shakespeare"
        assert feature != FeatureId(FeatureKind.ATTR, "author", "Shakespeare")

    @given(st.sampled_from(list(FeatureKind)), text, text, text)
    def test_parse_inverts_scoped_canonical(self, kind, key, value, scope):
        feature = FeatureId(kind, key, value, scope)
        assert FeatureId.parse(feature.canonical) == feature

    @given(text, text, text, text)
    def test_canonical_form_is_unique(self, k1, v1, k2, v2):
        """Property: distinct features never share a canonical form"""
        a = FeatureId(FeatureKind.ATTR, k1, v1)
        b = FeatureId(FeatureKind.ATTR, k2, v2)
        assert (a.canonical == b.canonical) == (a == b)
