"""N-Triples serialization round-trips and strict parsing."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsevents.rdf import (
    Literal,
    RdfError,
    Triple,
    parse_ntriples,
    to_ntriples,
    to_turtle,
)


class TestSerialization:
    def test_simple_triple_line(self):
        text = to_ntriples([Triple("http://x/s", "http://x/p", "http://x/o")])
        assert text == "<http://x/s> <http://x/p> <http://x/o> .\n"

    def test_literal_escaping(self):
        triple = Triple("http://x/s", "http://x/p", Literal('say "hi"\n\tdone\\'))
        line = to_ntriples([triple])
        assert '\\"hi\\"' in line and "\\n" in line and "\\t" in line and "\\\\" in line

    def test_language_and_datatype(self):
        lang = to_ntriples([Triple("http://x/s", "http://x/p", Literal("hi", lang="en"))])
        assert lang.strip().endswith('"hi"@en .')
        typed = to_ntriples(
            [Triple("http://x/s", "http://x/p", Literal("5", datatype="http://x/int"))]
        )
        assert typed.strip().endswith('"5"^^<http://x/int> .')

    def test_relative_iri_rejected(self):
        with pytest.raises(RdfError):
            to_ntriples([Triple("not-absolute", "http://x/p", "http://x/o")])

    def test_bad_iri_characters_rejected(self):
        with pytest.raises(RdfError):
            to_ntriples([Triple("http://x/a b", "http://x/p", "http://x/o")])

    def test_literal_cannot_have_lang_and_datatype(self):
        with pytest.raises(RdfError):
            Literal("x", lang="en", datatype="http://x/int")


class TestParsing:
    def test_parse_rejects_junk(self):
        with pytest.raises(RdfError, match="line 1"):
            parse_ntriples("this is not a triple .")

    def test_parse_skips_comments_and_blanks(self):
        text = "# header\n\n<http://x/s> <http://x/p> <http://x/o> .\n"
        assert len(parse_ntriples(text)) == 1

    def test_unicode_escapes(self):
        text = '<http://x/s> <http://x/p> "caf\\u00E9" .\n'
        assert parse_ntriples(text)[0].object == Literal("café")

    def test_round_trip_exotic_literals(self):
        triples = [
            Triple("http://x/s", "http://x/p", Literal('quote " backslash \\ tab \t')),
            Triple("http://x/s", "http://x/p", Literal("newline\nand\rcr")),
            Triple("http://x/s", "http://x/p", Literal("Ünïcodé ß 中文")),
            Triple("http://x/s", "http://x/p", Literal("plain", lang="en")),
            Triple("http://x/s", "http://x/p", Literal("7", datatype="http://x/t")),
        ]
        assert parse_ntriples(to_ntriples(triples)) == triples

    @given(
        st.text(max_size=80),
        st.sampled_from([None, "en", "de", "fr-CA"]),
    )
    @settings(max_examples=150)
    def test_round_trip_property(self, text, lang):
        triple = Triple("http://x/s", "http://x/p", Literal(text, lang=lang))
        assert parse_ntriples(to_ntriples([triple])) == [triple]


class TestTurtle:
    def test_prefixed_output(self):
        triples = [
            Triple(
                "http://example.org/news/a1",
                "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
                "http://iptc.org/std/rNews/2011-10-07#Article",
            )
        ]
        text = to_turtle(triples)
        assert "@prefix rnews:" in text
        assert "a rnews:Article" in text
