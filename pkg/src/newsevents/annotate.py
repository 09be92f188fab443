"""Ground event property values in article text and serialize as RDF.

Textual claim values (and their aliases) are located by token-boundary
search over the whole article. Quantities are harder: news values drift
from the recorded figure as stories develop, so any number within ±10% of
the claim inside the first five sentences is a candidate, and candidates
are ranked by how much the surrounding words resemble the property label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .corpus import NewsArticle, Token, TokenStream, split_article, tokenize
from .embeddings import EmbeddingTable, cosine
from .kb import KbEvent, stopwords
from .rdf import (
    DC,
    IPTC_SUBJECTCODE,
    OWL,
    RDF_NS,
    RNEWS,
    SCHEMA_ORG,
    WD,
    WDT,
    XSD,
    Literal,
    Triple,
)

QUANTITY_TOLERANCE = 0.10
QUANTITY_MAX_SENTENCES = 5  # headline plus the first four body sentences


@dataclass(frozen=True)
class Annotation:
    """One property-value grounding in article text."""

    article_id: str
    pid: str
    label: str
    kind: str  # "entity" | "quantity"
    surface: str
    sentence: int
    start: int
    end: int
    value: object
    context_score: Optional[float] = None

    def to_dict(self) -> dict:
        record = {
            "article_id": self.article_id,
            "pid": self.pid,
            "label": self.label,
            "kind": self.kind,
            "surface": self.surface,
            "sentence": self.sentence,
            "start": self.start,
            "end": self.end,
            "value": self.value,
        }
        if self.context_score is not None:
            record["context_score"] = self.context_score
        return record


def load_alias_table(text: str) -> dict[str, list[str]]:
    """Parse the ``{canonical: [aliases]}`` JSON alias file."""
    table = json.loads(text)
    if not isinstance(table, dict):
        raise ValueError("alias table must be a JSON object")
    out = {}
    for canonical, aliases in table.items():
        cleaned = [str(a) for a in aliases if str(a)]
        out[str(canonical)] = cleaned
    return out


def _find_phrase(
    tokens: Sequence[Token], norms: Sequence[str], needle: Sequence[str]
) -> Optional[tuple[int, int]]:
    """First occurrence of a token phrase; returns (first_idx, last_idx)."""
    n = len(needle)
    if n == 0 or n > len(norms):
        return None
    for i in range(len(norms) - n + 1):
        if norms[i] == needle[0] and list(norms[i : i + n]) == list(needle):
            return i, i + n - 1
    return None


def annotate_entities(
    article: NewsArticle,
    event: KbEvent,
    aliases: Mapping[str, Sequence[str]] | None = None,
    _stream: TokenStream | None = None,
) -> list[Annotation]:
    """Locate textual claim values (or their aliases) in the article.

    Case-insensitive token-boundary matching; the first occurrence per claim
    is annotated, and at most one annotation per pid is emitted (earliest
    match wins when several claims share a pid).
    """
    stream = _stream if _stream is not None else split_article(article)
    tokens = stream.tokens
    norms = [t.norm for t in tokens]
    text = article.text
    best_by_pid: dict[str, Annotation] = {}
    for claim in event.claims:
        value = claim.text_value
        if value is None or not value:
            continue
        variants = [value]
        if aliases:
            variants.extend(aliases.get(value, ()))
        hit = None
        for variant in variants:
            needle = tokenize(variant).norms()
            found = _find_phrase(tokens, norms, needle)
            if found and (hit is None or found < hit):
                hit = found
        if hit is None:
            continue
        first, last = tokens[hit[0]], tokens[hit[1]]
        annotation = Annotation(
            article_id=article.id,
            pid=claim.pid,
            label=claim.label,
            kind="entity",
            surface=text[first.start : last.end],
            sentence=first.sentence,
            start=first.start,
            end=last.end,
            value=value,
        )
        current = best_by_pid.get(claim.pid)
        if current is None or annotation.start < current.start:
            best_by_pid[claim.pid] = annotation
    return sorted(best_by_pid.values(), key=lambda a: (a.start, a.pid))


def _numeric_value(norm: str) -> Optional[float]:
    if not norm or not norm[0].isdigit():
        return None
    try:
        return float(norm)
    except ValueError:
        return None


def context_score(
    stream: TokenStream,
    token_index: int,
    claim_label: str,
    table: EmbeddingTable,
    window: int = 5,
) -> float:
    """Similarity between a number's surrounding words and a property label.

    Cosine of the mean embedding of the non-stopword tokens within ``window``
    positions of the candidate against the mean embedding of the label's
    non-stopword tokens; 0 when either side is empty or fully out of
    vocabulary.
    """
    stop = stopwords()
    tokens = stream.tokens
    lo = max(0, token_index - window)
    hi = min(len(tokens), token_index + window + 1)
    context = [
        t.norm
        for i, t in enumerate(tokens[lo:hi], start=lo)
        if i != token_index and t.norm not in stop
    ]
    label_tokens = [t for t in tokenize(claim_label).norms() if t not in stop]
    context_vec = table.mean_vector(context)
    label_vec = table.mean_vector(label_tokens)
    if context_vec is None or label_vec is None:
        return 0.0
    return cosine(context_vec, label_vec)


def annotate_quantities(
    article: NewsArticle,
    event: KbEvent,
    table: EmbeddingTable,
    tolerance: float = QUANTITY_TOLERANCE,
    max_sentences: int = QUANTITY_MAX_SENTENCES,
    _stream: TokenStream | None = None,
) -> list[Annotation]:
    """Ground quantity claims on numbers within ±tolerance of the claim.

    Only numbers in the first ``max_sentences`` sentences qualify. Among a
    claim's candidates the highest context score wins, ties going to the
    earlier sentence and then the earlier char offset. The annotation's
    value is the canonical claim value, not the matched figure.
    """
    stream = _stream if _stream is not None else split_article(article)
    text = article.text
    numeric: list[tuple[int, Token, float]] = []
    for index, token in enumerate(stream.tokens):
        if token.sentence >= max_sentences:
            continue
        value = _numeric_value(token.norm)
        if value is not None:
            numeric.append((index, token, value))
    best_by_pid: dict[str, Annotation] = {}
    for claim in event.claims:
        if claim.kind != "quantity" or claim.pid in best_by_pid:
            continue
        target = float(claim.value)
        candidates = [
            (index, token)
            for index, token, value in numeric
            if abs(value - target) <= tolerance * abs(target)
        ]
        if not candidates:
            continue
        scored = [
            (-context_score(stream, index, claim.label, table), token.sentence, token.start, token)
            for index, token in candidates
        ]
        scored.sort(key=lambda item: item[:3])
        neg_score, _, _, token = scored[0]
        best_by_pid[claim.pid] = Annotation(
            article_id=article.id,
            pid=claim.pid,
            label=claim.label,
            kind="quantity",
            surface=text[token.start : token.end],
            sentence=token.sentence,
            start=token.start,
            end=token.end,
            value=claim.value,
            context_score=-neg_score,
        )
    return sorted(best_by_pid.values(), key=lambda a: (a.start, a.pid))


def annotate_article(
    article: NewsArticle,
    event: KbEvent,
    table: EmbeddingTable,
    aliases: Mapping[str, Sequence[str]] | None = None,
    tolerance: float = QUANTITY_TOLERANCE,
    max_sentences: int = QUANTITY_MAX_SENTENCES,
) -> list[Annotation]:
    """Entity and quantity annotations for one mapped (article, event) pair."""
    stream = split_article(article)
    entities = annotate_entities(article, event, aliases=aliases, _stream=stream)
    quantities = annotate_quantities(
        article, event, table, tolerance=tolerance, max_sentences=max_sentences, _stream=stream
    )
    return sorted(entities + quantities, key=lambda a: (a.start, a.pid))


# ---------------------------------------------------------------------------
# RDF serialization


def format_quantity(value: object) -> str:
    """Literal text of a quantity: integral floats render without the .0."""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def serialize_rdf(
    article: NewsArticle,
    event: Optional[KbEvent],
    annotations: Sequence[Annotation] = (),
    schema_id: Optional[str] = None,
    base: str = "http://example.org",
) -> list[Triple]:
    """Triples for one article: metadata, event link, groundings, schema tag.

    Unmapped articles (``event is None``) yield metadata triples only. IRIs
    follow ``<base>/news/<id>`` and ``<base>/event/<id>``; the event node is
    the article-specific event instance, tied to the knowledge base through
    owl:sameAs.
    """
    news_iri = f"{base}/news/{article.id}"
    created = article.created.isoformat().replace("+00:00", "Z")
    triples = [
        Triple(news_iri, RDF_NS + "type", RNEWS + "Article"),
        Triple(news_iri, RNEWS + "dateCreated", Literal(created, datatype=XSD + "dateTime")),
        Triple(news_iri, RNEWS + "headline", Literal(article.headline, lang="en")),
    ]
    for code in article.iptc_codes:
        triples.append(Triple(news_iri, DC + "subject", IPTC_SUBJECTCODE + code))
    for slug in article.slugs:
        triples.append(Triple(news_iri, SCHEMA_ORG + "keywords", Literal(slug)))
    if event is None:
        return triples
    event_iri = f"{base}/event/{article.id}"
    triples.append(Triple(news_iri, RNEWS + "about", event_iri))
    triples.append(Triple(event_iri, RDF_NS + "type", SCHEMA_ORG + "Event"))
    for wet_qid in event.wet_qids():
        triples.append(Triple(event_iri, RDF_NS + "type", WD + wet_qid))
    triples.append(Triple(event_iri, OWL + "sameAs", WD + event.qid))
    for annotation in annotations:
        if annotation.kind == "quantity":
            value = Literal(format_quantity(annotation.value))
        else:
            value = Literal(str(annotation.value))
        triples.append(Triple(event_iri, WDT + annotation.pid, value))
    if schema_id:
        triples.append(Triple(event_iri, WDT + "schema", Literal(schema_id)))
    return triples
