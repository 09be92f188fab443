"""Newswire corpus model: articles, tokenization, sentences, IPTC taxonomy.

Parsers accept two renditions of the same article record (an XML subset and
a canonical JSONL form) and produce identical :class:`NewsArticle` values.
The tokenizer and sentence splitter defined here are used by every
downstream stage, so their rules are frozen and documented on the functions
themselves. They are deliberately simple, deterministic and replaceable.
"""

from __future__ import annotations

import csv
import io
import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence


class CorpusError(Exception):
    """Base class for corpus ingest failures."""


class ParseError(CorpusError):
    """Raised for malformed input bytes (ill-formed XML, bad JSON)."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class SchemaError(CorpusError):
    """Raised when well-formed input is missing a mandatory element/field."""


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class NewsArticle:
    """One newswire story.

    ``created`` is the document creation time (DCT) as a timezone-aware
    datetime. ``iptc_codes`` preserves input order; every article carries at
    least one code.
    """

    id: str
    headline: str
    created: datetime
    iptc_codes: tuple[str, ...]
    slugs: tuple[str, ...]
    paragraphs: tuple[str, ...]
    dateline: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise SchemaError("article id must be non-empty")
        if self.created.tzinfo is None:
            raise SchemaError(f"article {self.id}: created must be timezone-aware")
        if not self.iptc_codes:
            raise SchemaError(f"article {self.id}: at least one IPTC code required")
        if not self.paragraphs:
            raise SchemaError(f"article {self.id}: paragraphs must be non-empty")

    @property
    def text(self) -> str:
        """Canonical rendering: headline + paragraphs, blank-line separated.

        Token char spans produced by :func:`split_article` index into this
        exact string.
        """
        return "\n\n".join((self.headline,) + self.paragraphs)

    def created_date(self):
        """Calendar date of the DCT in UTC."""
        return self.created.astimezone(timezone.utc).date()


@dataclass(frozen=True)
class IptcTopic:
    code: str
    label: str
    parent_code: Optional[str] = None


class Token(NamedTuple):
    surface: str
    norm: str
    sentence: int
    start: int
    end: int


@dataclass(frozen=True)
class TokenStream:
    """Ordered tokens with char spans into one source text."""

    tokens: tuple[Token, ...]

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def norms(self) -> list[str]:
        return [t.norm for t in self.tokens]

    def sentence_count(self) -> int:
        return self.tokens[-1].sentence + 1 if self.tokens else 0

    def window(self, sentences: int | None) -> "TokenStream":
        """Tokens of the first ``sentences`` sentences (None = all)."""
        if sentences is None:
            return self
        return TokenStream(tuple(t for t in self.tokens if t.sentence < sentences))


# ---------------------------------------------------------------------------
# Tokenization

# A token is a run of word characters, optionally chained through internal
# hyphens, apostrophes, periods or commas ("mid-air", "U.S", "1,500", "3.5").
_TOKEN_RE = re.compile(r"\w+(?:[-'’.,]\w+)*", re.UNICODE)
_DIGIT_GROUP_RE = re.compile(r"(?<=\d),(?=\d)")


def _normalize_token(surface: str) -> str:
    norm = surface.casefold()
    if norm.endswith(("'s", "’s")):
        norm = norm[:-2]
    if any(c.isdigit() for c in norm):
        norm = _DIGIT_GROUP_RE.sub("", norm)
    return norm


def tokenize(text: str, sentence: int = 0) -> TokenStream:
    """Segment ``text`` into word tokens.

    Rules: runs of Unicode word characters form tokens; internal hyphens,
    apostrophes, periods and commas are kept ("mid-air" is one token);
    surrounding punctuation never enters a token. The normalized form is the
    case-folded surface with possessive 's suffixes dropped and
    digit-grouping commas removed ("1,500" -> "1500"). Numbers are ordinary
    tokens. Empty text yields an empty stream.
    """
    tokens = [
        Token(m.group(), _normalize_token(m.group()), sentence, m.start(), m.end())
        for m in _TOKEN_RE.finditer(text)
    ]
    return TokenStream(tuple(tokens))


# ---------------------------------------------------------------------------
# Sentence splitting

# Words that end with a period without terminating a sentence.
_ABBREVIATIONS = frozenset(
    """
    mr mrs ms dr prof gen col sgt maj lt capt sen rep gov pres adm fr rev
    st jr sr vs etc e.g i.e cf al no inc ltd co corp dept est fig
    jan feb mar apr jun jul aug sep sept oct nov dec
    u.s u.n u.k e.u a.m p.m
    """.split()
)

_BOUNDARY_RE = re.compile(r"[.!?]+[\"'”’)\]]*\s+(?=[\"'“‘(\[]*[A-Z0-9])")
_TRAILING_WORD_RE = re.compile(r"([\w.]+?)\.?[\"'”’)\]]*[.!?]+[\"'”’)\]]*$")


def split_text_sentences(text: str) -> list[tuple[int, int]]:
    """Sentence spans of a text block.

    A boundary is terminal punctuation (. ! ?), optionally followed by
    closing quotes/brackets, then whitespace, then an opening quote/bracket
    or directly an uppercase letter or digit. A candidate is rejected when
    the word before the punctuation is on the abbreviation stoplist or is a
    single initial ("J.").
    """
    spans: list[tuple[int, int]] = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        segment = text[start : m.end()]
        head = segment.rstrip()
        wm = _TRAILING_WORD_RE.search(head)
        if wm:
            word = wm.group(1).rstrip(".").casefold()
            if word in _ABBREVIATIONS or (len(word) == 1 and word.isalpha()):
                continue
        lead = len(segment) - len(segment.lstrip())
        if len(head) > lead:
            spans.append((start + lead, start + len(head)))
        start = m.end()
    tail = text[start:].strip()
    if tail:
        tail_start = start + (len(text[start:]) - len(text[start:].lstrip()))
        spans.append((tail_start, tail_start + len(tail)))
    return spans


def split_article(article: NewsArticle) -> TokenStream:
    """Sentence-indexed token stream over :attr:`NewsArticle.text`.

    The headline is always sentence 0 (never subdivided); body sentences are
    numbered from 1 in reading order, and a paragraph break always ends a
    sentence. Char spans index into ``article.text``.
    """
    text = article.text
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(article.headline):
        tokens.append(Token(m.group(), _normalize_token(m.group()), 0, m.start(), m.end()))
    sentence = 1
    offset = len(article.headline) + 2
    for paragraph in article.paragraphs:
        for s_start, s_end in split_text_sentences(paragraph):
            for m in _TOKEN_RE.finditer(paragraph, s_start, s_end):
                tokens.append(
                    Token(
                        m.group(),
                        _normalize_token(m.group()),
                        sentence,
                        offset + m.start(),
                        offset + m.end(),
                    )
                )
            sentence += 1
        offset += len(paragraph) + 2
    return TokenStream(tuple(tokens))


# ---------------------------------------------------------------------------
# Article parsing


def parse_timestamp(value: str, context: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    try:
        parsed = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise SchemaError(f"{context}: invalid ISO-8601 timestamp {value!r}") from exc
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def _decode_xml(xml_bytes: bytes) -> ET.Element:
    try:
        return ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        line, column = exc.position
        offset = 0
        for i, raw in enumerate(xml_bytes.splitlines(keepends=True), start=1):
            if i == line:
                offset += column
                break
            offset += len(raw)
        raise ParseError(f"malformed XML at byte {offset}: {exc}", offset=offset) from exc


def parse_newsml(xml_bytes: bytes) -> NewsArticle:
    """Parse one article in the NewsML-subset rendition.

    Expected shape: root ``<NewsItem>`` with ``<Identification>``,
    ``<DateCreated>``, optional ``<Dateline>``, repeated
    ``<SubjectCode code="..."/>``, repeated ``<Keyword>``, ``<HeadLine>``
    and repeated ``<p>`` body paragraphs. Declared encodings are transcoded;
    the internal model is always Unicode text.
    """
    root = _decode_xml(xml_bytes)
    if root.tag != "NewsItem":
        raise SchemaError(f"expected <NewsItem> root, got <{root.tag}>")

    def required(tag: str) -> str:
        node = root.find(tag)
        if node is None or not (node.text or "").strip():
            raise SchemaError(f"missing {tag}")
        return node.text.strip()

    article_id = required("Identification")
    created = parse_timestamp(required("DateCreated"), f"article {article_id}")
    headline = required("HeadLine")
    dateline_node = root.find("Dateline")
    dateline = dateline_node.text.strip() if dateline_node is not None and dateline_node.text else None
    codes = []
    for node in root.findall("SubjectCode"):
        code = node.get("code", "").strip()
        if not code:
            raise SchemaError(f"article {article_id}: SubjectCode without code attribute")
        codes.append(code)
    slugs = tuple((node.text or "").strip() for node in root.findall("Keyword"))
    paragraphs = tuple(" ".join((node.text or "").split()) for node in root.findall("p"))
    return NewsArticle(
        id=article_id,
        headline=headline,
        created=created,
        iptc_codes=tuple(codes),
        slugs=tuple(s for s in slugs if s),
        paragraphs=tuple(p for p in paragraphs if p),
        dateline=dateline,
    )


_JSONL_REQUIRED = ("id", "headline", "created", "iptc", "body")


def parse_article_jsonl(line: str) -> NewsArticle:
    """Parse one line of the canonical article JSONL rendition.

    Fields: ``id, headline, created, dateline?, iptc:[...], slugs:[...],
    body:[...]``. Produces a value structurally equal to what
    :func:`parse_newsml` yields for the equivalent XML document.
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", offset=exc.pos) from exc
    if not isinstance(record, dict):
        raise SchemaError("article record must be a JSON object")
    for key in _JSONL_REQUIRED:
        if key not in record:
            raise SchemaError(f"missing field {key!r}")
    created = parse_timestamp(str(record["created"]), f"article {record['id']}")
    return NewsArticle(
        id=str(record["id"]),
        headline=str(record["headline"]),
        created=created,
        iptc_codes=tuple(str(c) for c in record["iptc"]),
        slugs=tuple(str(s) for s in record.get("slugs", [])),
        paragraphs=tuple(str(p) for p in record["body"]),
        dateline=record.get("dateline"),
    )


def read_articles_jsonl(lines: Iterable[str]) -> list[NewsArticle]:
    articles = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            articles.append(parse_article_jsonl(line))
        except CorpusError as exc:
            raise type(exc)(f"line {number}: {exc}") from exc
    return articles


# ---------------------------------------------------------------------------
# IPTC taxonomy


class Taxonomy:
    """Queryable forest of IPTC Media Topics."""

    def __init__(self, topics: Sequence[IptcTopic]):
        self._by_code = {t.code: t for t in topics}

    def __contains__(self, code: str) -> bool:
        return code in self._by_code

    def __len__(self) -> int:
        return len(self._by_code)

    def get(self, code: str) -> IptcTopic:
        return self._by_code[code]

    def ancestors(self, code: str) -> list[IptcTopic]:
        """Parent chain of ``code``, nearest first."""
        chain = []
        current = self._by_code[code].parent_code
        while current:
            topic = self._by_code[current]
            chain.append(topic)
            current = topic.parent_code
        return chain

    def roots(self) -> list[IptcTopic]:
        return [t for t in self._by_code.values() if not t.parent_code]


def load_iptc_taxonomy(csv_bytes: bytes) -> Taxonomy:
    """Load the ``code,label,parent_code`` taxonomy CSV into a forest.

    Duplicate codes, dangling parents and parent cycles are rejected.
    """
    reader = csv.DictReader(io.StringIO(csv_bytes.decode("utf-8")))
    expected = {"code", "label", "parent_code"}
    if reader.fieldnames is None or not expected.issubset(reader.fieldnames):
        raise SchemaError("taxonomy CSV must have header code,label,parent_code")
    topics: dict[str, IptcTopic] = {}
    for row in reader:
        code = (row["code"] or "").strip()
        if not code:
            continue
        if code in topics:
            raise SchemaError(f"duplicate taxonomy code {code!r}")
        parent = (row["parent_code"] or "").strip() or None
        topics[code] = IptcTopic(code=code, label=(row["label"] or "").strip(), parent_code=parent)
    dangling = sorted(
        t.code for t in topics.values() if t.parent_code and t.parent_code not in topics
    )
    if dangling:
        raise SchemaError(f"dangling parent_code for codes: {', '.join(dangling)}")
    for topic in topics.values():
        seen = {topic.code}
        current = topic.parent_code
        while current:
            if current in seen:
                raise SchemaError(f"parent cycle involving code {current!r}")
            seen.add(current)
            current = topics[current].parent_code
    return Taxonomy(list(topics.values()))
