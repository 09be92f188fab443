"""RDF triples, N-Triples serialization and a strict line parser.

The canonical output is N-Triples with fully expanded IRIs, one statement
per line. A pretty Turtle export exists for humans; round-tripping is
guaranteed only for the N-Triples form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Union

RNEWS = "http://iptc.org/std/rNews/2011-10-07#"
DC = "http://purl.org/dc/elements/1.1/"
SCHEMA_ORG = "http://schema.org/"
OWL = "http://www.w3.org/2002/07/owl#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD = "http://www.w3.org/2001/XMLSchema#"
WD = "http://www.wikidata.org/entity/"
WDT = "http://www.wikidata.org/prop/direct/"
IPTC_SUBJECTCODE = "http://cv.iptc.org/newscodes/subjectcode/"

PREFIXES = {
    "rnews": RNEWS,
    "dc": DC,
    "schema": SCHEMA_ORG,
    "owl": OWL,
    "rdf": RDF_NS,
    "xsd": XSD,
    "wd": WD,
    "wdt": WDT,
}


class RdfError(Exception):
    pass


@dataclass(frozen=True)
class Literal:
    text: str
    lang: Optional[str] = None
    datatype: Optional[str] = None

    def __post_init__(self) -> None:
        if self.lang and self.datatype:
            raise RdfError("a literal cannot carry both a language tag and a datatype")


Node = Union[str, Literal]  # str = IRI


class Triple(NamedTuple):
    subject: str
    predicate: str
    object: Node


_IRI_BAD = re.compile(r'[\x00-\x20<>"{}|^`\\]')


def _check_iri(iri: str) -> str:
    if not re.match(r"^[A-Za-z][A-Za-z0-9+.-]*:", iri):
        raise RdfError(f"IRI must be absolute: {iri!r}")
    bad = _IRI_BAD.search(iri)
    if bad:
        raise RdfError(f"character {bad.group()!r} not allowed in IRI {iri!r}")
    return iri


# Characters that must never appear raw inside a one-line literal: C0/C1
# controls plus the Unicode line/paragraph separators (str.splitlines treats
# them all as line boundaries).
_FORCE_ESCAPE = frozenset(
    {0x7F, 0x2028, 0x2029} | set(range(0x00, 0x20)) | set(range(0x80, 0xA1))
)


def _escape_literal(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) in _FORCE_ESCAPE:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def format_node(node: Node) -> str:
    if isinstance(node, Literal):
        body = f'"{_escape_literal(node.text)}"'
        if node.lang:
            return f"{body}@{node.lang}"
        if node.datatype:
            return f"{body}^^<{_check_iri(node.datatype)}>"
        return body
    return f"<{_check_iri(node)}>"


def to_ntriples(triples: Iterable[Triple]) -> str:
    """Serialize to canonical N-Triples (UTF-8 text, one triple per line)."""
    lines = [
        f"<{_check_iri(t.subject)}> <{_check_iri(t.predicate)}> {format_node(t.object)} ."
        for t in triples
    ]
    return "\n".join(lines) + ("\n" if lines else "")


_UNESCAPE = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def _unescape_literal(raw: str, line_number: int) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(raw):
            raise RdfError(f"line {line_number}: dangling escape")
        nxt = raw[i + 1]
        if nxt in _UNESCAPE:
            out.append(_UNESCAPE[nxt])
            i += 2
        elif nxt == "u":
            out.append(chr(int(raw[i + 2 : i + 6], 16)))
            i += 6
        elif nxt == "U":
            out.append(chr(int(raw[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise RdfError(f"line {line_number}: unknown escape \\{nxt}")
    return "".join(out)


_TRIPLE_LINE = re.compile(
    r"^<([^<>]*)>\s+<([^<>]*)>\s+"
    r'(?:<([^<>]*)>|"((?:[^"\\]|\\.)*)"(?:@([A-Za-z][A-Za-z0-9-]*)|\^\^<([^<>]*)>)?)'
    r"\s*\.\s*$"
)


def parse_ntriples(text: str) -> list[Triple]:
    """Strict parser for the serializer's output subset of N-Triples.

    Supports IRI subjects/predicates and IRI or literal objects (with
    optional language tag or datatype). Anything else, including blank
    nodes, is rejected with the offending line number.
    """
    triples = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _TRIPLE_LINE.match(stripped)
        if not m:
            raise RdfError(f"line {number}: not a valid triple: {stripped[:80]!r}")
        subject, predicate, obj_iri, obj_text, lang, datatype = m.groups()
        obj: Node
        if obj_iri is not None:
            obj = _check_iri(obj_iri)
        else:
            obj = Literal(
                text=_unescape_literal(obj_text, number), lang=lang, datatype=datatype
            )
        triples.append(Triple(_check_iri(subject), _check_iri(predicate), obj))
    return triples


def to_turtle(triples: Iterable[Triple], prefixes: dict[str, str] | None = None) -> str:
    """Pretty Turtle export (prefixed names where possible, grouped by subject)."""
    prefixes = dict(PREFIXES if prefixes is None else prefixes)

    def shrink(iri: str) -> str:
        for prefix, base in prefixes.items():
            if iri.startswith(base):
                local = iri[len(base) :]
                if re.fullmatch(r"[A-Za-z0-9_.-]*", local):
                    return f"{prefix}:{local}"
        return f"<{iri}>"

    def fmt(node: Node) -> str:
        if isinstance(node, Literal):
            body = f'"{_escape_literal(node.text)}"'
            if node.lang:
                return f"{body}@{node.lang}"
            if node.datatype:
                return f"{body}^^{shrink(node.datatype)}"
            return body
        return shrink(node)

    by_subject: dict[str, list[Triple]] = {}
    for t in triples:
        by_subject.setdefault(t.subject, []).append(t)
    out = [f"@prefix {p}: <{iri}> ." for p, iri in prefixes.items()]
    out.append("")
    for subject, group in by_subject.items():
        lines = [f"{shrink(subject)}"]
        for i, t in enumerate(group):
            predicate = "a" if t.predicate == RDF_NS + "type" else shrink(t.predicate)
            tail = " ;" if i < len(group) - 1 else " ."
            lines.append(f"    {predicate} {fmt(t.object)}{tail}")
        out.append("\n".join(lines))
        out.append("")
    return "\n".join(out)
