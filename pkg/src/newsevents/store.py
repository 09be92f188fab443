"""Embedded triple store, full-text index, and the combined search engine.

The store is batch-oriented: a single writer inserts during the build
phase, then the store is frozen and served read-only, so queries never
lock. Search combines conjunctive keyword matching, date/location filters,
schema membership and property-value filters with plain intersection
semantics; adding a filter can only shrink the result set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from math import log
from typing import Iterable, Mapping, Optional, Sequence

from .annotate import Annotation
from .clustering import SchemaCluster
from .corpus import NewsArticle, split_article, tokenize
from .gazetteer import EntityMention
from .kb import KbEvent
from .rdf import Literal, Triple

COMPARATORS = ("eq", "gte", "lte")
MAX_PAGE_SIZE = 100


class StoreError(Exception):
    pass


class FrozenStoreError(StoreError):
    pass


class UnknownIdError(StoreError):
    """Lookup of an id that does not exist (maps to HTTP 404)."""


class QueryError(StoreError):
    """Invalid query parameter (maps to HTTP 400)."""


# ---------------------------------------------------------------------------
# Triple store


def _node_key(node: object) -> str:
    if isinstance(node, Literal):
        return f'"{node.text}"@{node.lang or ""}^^{node.datatype or ""}'
    return f"<{node}>"


class TripleStore:
    """Triple set with SPO / POS / OSP index permutations."""

    def __init__(self) -> None:
        self._triples: set[Triple] = set()
        self._spo: dict[str, dict[str, set]] = {}
        self._pos: dict[str, dict[object, set]] = {}
        self._osp: dict[object, dict[str, set]] = {}
        self._frozen = False

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self):
        return iter(self._triples)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> None:
        self._frozen = True

    def insert(self, triples: Iterable[Triple]) -> int:
        """Insert triples, ignoring duplicates; returns the number added."""
        if self._frozen:
            raise FrozenStoreError("store is frozen; no further inserts")
        added = 0
        for t in triples:
            if t in self._triples:
                continue
            self._triples.add(t)
            self._spo.setdefault(t.subject, {}).setdefault(t.predicate, set()).add(t.object)
            self._pos.setdefault(t.predicate, {}).setdefault(t.object, set()).add(t.subject)
            self._osp.setdefault(t.object, {}).setdefault(t.subject, set()).add(t.predicate)
            added += 1
        return added

    def match(
        self,
        subject: Optional[str] = None,
        predicate: Optional[str] = None,
        object: object = None,
    ) -> list[Triple]:
        """All triples matching a pattern with any subset of S/P/O bound.

        Results are sorted canonically so pagination and snapshots stay
        deterministic.
        """
        s, p, o = subject, predicate, object
        out: Iterable[Triple]
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            out = [t] if t in self._triples else []
        elif s is not None and p is not None:
            out = (Triple(s, p, obj) for obj in self._spo.get(s, {}).get(p, ()))
        elif p is not None and o is not None:
            out = (Triple(subj, p, o) for subj in self._pos.get(p, {}).get(o, ()))
        elif s is not None and o is not None:
            out = (Triple(s, pred, o) for pred in self._osp.get(o, {}).get(s, ()))
        elif s is not None:
            out = (
                Triple(s, pred, obj)
                for pred, objects in self._spo.get(s, {}).items()
                for obj in objects
            )
        elif p is not None:
            out = (
                Triple(subj, p, obj)
                for obj, subjects in self._pos.get(p, {}).items()
                for subj in subjects
            )
        elif o is not None:
            out = (
                Triple(subj, pred, o)
                for subj, preds in self._osp.get(o, {}).items()
                for pred in preds
            )
        else:
            out = self._triples
        return sorted(out, key=lambda t: (t.subject, t.predicate, _node_key(t.object)))


# ---------------------------------------------------------------------------
# Full-text index


class FullTextIndex:
    """Inverted index over article tokens, scored by corpus tf.idf."""

    def __init__(self) -> None:
        self._postings: dict[str, dict[str, list[int]]] = {}  # token -> id -> positions
        self._articles: dict[str, NewsArticle] = {}

    def __len__(self) -> int:
        return len(self._articles)

    def index_article(self, article: NewsArticle) -> None:
        if article.id in self._articles:
            raise StoreError(f"article {article.id} already indexed")
        self._articles[article.id] = article
        for position, token in enumerate(split_article(article)):
            self._postings.setdefault(token.norm, {}).setdefault(article.id, []).append(position)

    def idf(self, token: str) -> float:
        df = len(self._postings.get(token, ()))
        if df == 0:
            return 0.0
        return log(len(self._articles) / df)

    def weight(self, token: str, article_id: str) -> float:
        positions = self._postings.get(token, {}).get(article_id)
        if not positions:
            return 0.0
        return len(positions) * self.idf(token)

    def search(self, keywords: str) -> list[tuple[str, float]]:
        """Conjunctive keyword search; hits scored by summed tf.idf.

        Returns (article id, score) pairs sorted by score descending, id
        ascending. An empty query matches nothing.
        """
        terms = sorted(set(tokenize(keywords).norms()))
        if not terms:
            return []
        candidate_ids: Optional[set[str]] = None
        for term in terms:
            ids = set(self._postings.get(term, ()))
            candidate_ids = ids if candidate_ids is None else candidate_ids & ids
            if not candidate_ids:
                return []
        scored = [
            (article_id, sum(self.weight(term, article_id) for term in terms))
            for article_id in candidate_ids
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return scored

    def best_term(self, terms: Sequence[str], article_id: str) -> Optional[str]:
        """The matched query term with the highest weight in one article."""
        weighted = [(self.weight(t, article_id), t) for t in terms]
        weighted = [(w, t) for w, t in weighted if w > 0.0]
        if not weighted:
            return None
        weighted.sort(key=lambda pair: (-pair[0], pair[1]))
        return weighted[0][1]

    def first_position(self, term: str, article_id: str) -> Optional[int]:
        positions = self._postings.get(term, {}).get(article_id)
        return positions[0] if positions else None


# ---------------------------------------------------------------------------
# Search engine over the built pipeline output


@dataclass(frozen=True)
class PropertyFilter:
    pid: str
    comparator: str  # eq | gte | lte
    value: object

    def __post_init__(self) -> None:
        if self.comparator not in COMPARATORS:
            raise QueryError(f"unknown comparator {self.comparator!r}")


@dataclass(frozen=True)
class SearchQuery:
    keywords: Optional[str] = None
    date_from: Optional[date] = None
    date_to: Optional[date] = None
    location: Optional[str] = None
    schema_id: Optional[str] = None
    filters: tuple[PropertyFilter, ...] = ()
    page: int = 1
    page_size: int = 10

    def __post_init__(self) -> None:
        if self.page < 1:
            raise QueryError("page numbers start at 1")
        if not 1 <= self.page_size <= MAX_PAGE_SIZE:
            raise QueryError(f"page size must be in 1..{MAX_PAGE_SIZE}")


@dataclass(frozen=True)
class SearchHit:
    article_id: str
    headline: str
    created: str
    schema_id: Optional[str]
    snippet: str
    score: float


@dataclass(frozen=True)
class SearchResult:
    total: int
    page: int
    page_size: int
    hits: tuple[SearchHit, ...]


@dataclass
class ArticleRecord:
    """Everything the engine knows about one article."""

    article: NewsArticle
    event_qid: Optional[str] = None
    schema_id: Optional[str] = None
    mapping_score: Optional[float] = None
    annotations: list[Annotation] = field(default_factory=list)
    entities: list[EntityMention] = field(default_factory=list)


class SearchEngine:
    """Read-only faceted search over the pipeline's articles and triples."""

    def __init__(
        self,
        records: Sequence[ArticleRecord],
        events: Mapping[str, KbEvent],
        schemas: Sequence[SchemaCluster],
        store: TripleStore,
    ):
        self._records = {r.article.id: r for r in records}
        self._events = dict(events)
        self._schemas = {s.schema_id: s for s in schemas}
        self._store = store
        if not store.frozen:
            store.freeze()
        self._index = FullTextIndex()
        for record in records:
            self._index.index_article(record.article)
        self._property_kinds: dict[str, str] = {}
        self._property_labels: dict[str, str] = {}
        for event in self._events.values():
            for claim in event.claims:
                self._property_kinds.setdefault(claim.pid, claim.kind)
                self._property_labels.setdefault(claim.pid, claim.label)

    # -- queries ----------------------------------------------------------

    @property
    def store(self) -> TripleStore:
        return self._store

    @property
    def index(self) -> FullTextIndex:
        return self._index

    def article_ids(self) -> list[str]:
        return sorted(self._records)

    def _annotation_values(self, record: ArticleRecord, pid: str) -> list[object]:
        return [a.value for a in record.annotations if a.pid == pid]

    def _passes_filter(self, record: ArticleRecord, f: PropertyFilter) -> bool:
        values = self._annotation_values(record, f.pid)
        if not values:
            return False
        if f.comparator == "eq":
            return any(str(v) == str(f.value) or v == f.value for v in values)
        target = float(f.value)  # validated numeric upstream
        numeric = [float(v) for v in values if isinstance(v, (int, float))]
        if f.comparator == "gte":
            return any(v >= target for v in numeric)
        return any(v <= target for v in numeric)

    def _validate_filters(self, query: SearchQuery) -> None:
        if query.schema_id is not None and query.schema_id not in self._schemas:
            raise QueryError(f"unknown schema id {query.schema_id!r}")
        for f in query.filters:
            kind = self._property_kinds.get(f.pid)
            if kind is None:
                raise QueryError(f"unknown property {f.pid!r} in filter")
            if f.comparator in ("gte", "lte"):
                if kind != "quantity":
                    raise QueryError(
                        f"comparator {f.comparator} only applies to quantity properties"
                    )
                try:
                    float(f.value)
                except (TypeError, ValueError):
                    raise QueryError(f"filter value for {f.pid} must be numeric")

    def _snippet(self, record: ArticleRecord, terms: Sequence[str]) -> str:
        article = record.article
        stream = split_article(article)
        sentence = 1 if stream.sentence_count() > 1 else 0
        if terms:
            best = self._index.best_term(terms, article.id)
            if best is not None:
                position = self._index.first_position(best, article.id)
                if position is not None:
                    sentence = stream.tokens[position].sentence
        span = [t for t in stream.tokens if t.sentence == sentence]
        if not span:
            return article.headline[:240]
        text = article.text[span[0].start : span[-1].end]
        return text[:240]

    def search(self, query: SearchQuery) -> SearchResult:
        """Run a combined keyword + filter query with stable pagination."""
        self._validate_filters(query)
        scores: dict[str, float] = {}
        if query.keywords and query.keywords.strip():
            hits = self._index.search(query.keywords)
            candidates = [article_id for article_id, _ in hits]
            scores = dict(hits)
            terms = sorted(set(tokenize(query.keywords).norms()))
        else:
            candidates = self.article_ids()
            terms = []
        selected = []
        for article_id in candidates:
            record = self._records[article_id]
            article = record.article
            if query.date_from and article.created_date() < query.date_from:
                continue
            if query.date_to and article.created_date() > query.date_to:
                continue
            if query.location:
                needle = tokenize(query.location).norms()
                haystack = split_article(article).norms()
                if not needle or not _contains(haystack, needle):
                    continue
            if query.schema_id and record.schema_id != query.schema_id:
                continue
            if any(not self._passes_filter(record, f) for f in query.filters):
                continue
            selected.append(record)
        selected.sort(
            key=lambda r: (
                -scores.get(r.article.id, 0.0),
                -r.article.created.timestamp(),
                r.article.id,
            )
        )
        start = (query.page - 1) * query.page_size
        page_records = selected[start : start + query.page_size]
        hits = tuple(
            SearchHit(
                article_id=r.article.id,
                headline=r.article.headline,
                created=r.article.created.isoformat().replace("+00:00", "Z"),
                schema_id=r.schema_id,
                snippet=self._snippet(r, terms),
                score=scores.get(r.article.id, 0.0),
            )
            for r in page_records
        )
        return SearchResult(
            total=len(selected), page=query.page, page_size=query.page_size, hits=hits
        )

    def article_detail(self, article_id: str) -> dict:
        """Detail bundle: article, annotations, infobox entities, links."""
        record = self._records.get(article_id)
        if record is None:
            raise UnknownIdError(f"unknown article id {article_id!r}")
        article = record.article
        return {
            "id": article.id,
            "headline": article.headline,
            "created": article.created.isoformat().replace("+00:00", "Z"),
            "dateline": article.dateline,
            "iptc_codes": list(article.iptc_codes),
            "slugs": list(article.slugs),
            "paragraphs": list(article.paragraphs),
            "text": article.text,
            "event_qid": record.event_qid,
            "schema_id": record.schema_id,
            "mapping_score": record.mapping_score,
            "annotations": [a.to_dict() for a in record.annotations],
            "entities": [
                {"surface": e.surface, "category": e.category, "start": e.start, "end": e.end}
                for e in record.entities
            ],
        }

    def schema_list(self) -> list[dict]:
        counts: dict[str, int] = {}
        for record in self._records.values():
            if record.schema_id:
                counts[record.schema_id] = counts.get(record.schema_id, 0) + 1
        return [
            {
                "schema_id": s.schema_id,
                "label": s.label,
                "wet_count": len(s.wets),
                "article_count": counts.get(s.schema_id, 0),
            }
            for s in sorted(self._schemas.values(), key=lambda s: _schema_sort_key(s.schema_id))
        ]

    def schema_detail(self, schema_id: str) -> dict:
        schema = self._schemas.get(schema_id)
        if schema is None:
            raise UnknownIdError(f"unknown schema id {schema_id!r}")
        return {
            "schema_id": schema.schema_id,
            "label": schema.label,
            "wets": list(schema.wets),
            "filters": [
                {
                    "pid": f.pid,
                    "label": f.label,
                    "kind": f.kind,
                    "coverage": f.coverage,
                    "range_filterable": f.range_filterable,
                }
                for f in schema.filters
            ],
        }

    def event_detail(self, qid: str) -> dict:
        event = self._events.get(qid)
        if event is None:
            raise UnknownIdError(f"unknown event qid {qid!r}")
        articles = sorted(
            record.article.id
            for record in self._records.values()
            if record.event_qid == qid
        )
        return {
            "qid": event.qid,
            "label": event.label,
            "aliases": list(event.aliases),
            "types": [{"qid": q, "label": l} for q, l in event.wets],
            "point_in_time": event.point_in_time.isoformat() if event.point_in_time else None,
            "start_time": event.start_time.isoformat() if event.start_time else None,
            "end_time": event.end_time.isoformat() if event.end_time else None,
            "countries": list(event.countries),
            "locations": list(event.locations),
            "claims": [
                {
                    "pid": c.pid,
                    "label": c.label,
                    "kind": c.kind,
                    "value": c.value,
                    "unit": c.unit,
                    "value_qid": c.value_qid,
                }
                for c in event.claims
            ],
            "article_ids": articles,
        }


def _contains(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    return any(list(haystack[i : i + n]) == list(needle) for i in range(len(haystack) - n + 1))


def _schema_sort_key(schema_id: str) -> tuple:
    if schema_id.startswith("S") and schema_id[1:].isdigit():
        return (0, int(schema_id[1:]))
    return (1, schema_id)
