"""Link articles to knowledge-base events: gates, scoring, evaluation.

An article maps to at most one event. A candidate event must pass the date
gate (article written during the event, or at most the day after a one-off
event) and the location gate (one of the event's country/location values
mentioned in the article), and its subject score must clear the configured
threshold. Among qualifying candidates the highest score wins; ties go to
the lexicographically smallest qid so results are order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import NewsArticle, TokenStream, split_article, tokenize
from .kb import KbEvent, event_keywords
from .stats import ImtStats, tfidf_imt

WINDOWS = (3, 5, None)  # sentence windows: first 3, first 5, all


def window_label(window: int | None) -> str:
    return "all" if window is None else str(window)


def parse_window(label: str) -> int | None:
    if label == "all":
        return None
    if label in ("3", "5"):
        return int(label)
    raise ValueError(f"unknown sentence window {label!r} (expected 3, 5 or all)")


@dataclass(frozen=True)
class MappingResult:
    article_id: str
    qid: str
    score: float
    window: str  # "3" | "5" | "all"


@dataclass(frozen=True)
class GoldStandard:
    """Manually verified (article id, event qid) pairs."""

    pairs: frozenset[tuple[str, str]]

    def __len__(self) -> int:
        return len(self.pairs)

    def article_ids(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.pairs)


@dataclass(frozen=True)
class WindowScores:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    per_window: dict[str, WindowScores]

    def to_dict(self) -> dict:
        return {
            label: {
                "precision": ws.precision,
                "recall": ws.recall,
                "f1": ws.f1,
                "tp": ws.tp,
                "fp": ws.fp,
                "fn": ws.fn,
            }
            for label, ws in self.per_window.items()
        }


def date_match(article: NewsArticle, event: KbEvent) -> bool:
    """Date gate, at day granularity in UTC.

    One-off events admit the event day and the day after; duration events
    admit any day from start to end inclusive.
    """
    dct: date = article.created_date()
    if event.point_in_time is not None:
        if event.point_in_time <= dct <= event.point_in_time + timedelta(days=1):
            return True
    if event.start_time is not None and event.end_time is not None:
        if event.start_time <= dct <= event.end_time:
            return True
    return False


def _contains_phrase(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    first = needle[0]
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and list(haystack[i : i + n]) == list(needle):
            return True
    return False


def location_match(
    article: NewsArticle,
    event: KbEvent,
    aliases: Mapping[str, Sequence[str]] | None = None,
    _tokens: TokenStream | None = None,
) -> bool:
    """Location gate: a country or location value occurs in the article.

    Matching is case-insensitive at token boundaries (so "Nice" never
    matches inside "nicely"); an alias table may widen each value. Events
    with no location values at all fail closed.
    """
    labels = list(event.countries) + list(event.locations)
    if not labels:
        return False
    stream = _tokens if _tokens is not None else split_article(article)
    haystack = stream.norms()
    for label in labels:
        variants = [label]
        if aliases:
            variants.extend(aliases.get(label, ()))
        for variant in variants:
            needle = tokenize(variant).norms()
            if needle and _contains_phrase(haystack, needle):
                return True
    return False


def subject_score(
    article: NewsArticle,
    event: KbEvent,
    stats: ImtStats,
    window: int | None = None,
    _tokens: TokenStream | None = None,
    _keywords: frozenset[str] | None = None,
) -> float:
    """Sum of topic-based tf.idf weights of event keywords in the article.

    Only tokens of the first ``window`` sentences count (headline included
    as sentence 0; None means the whole article); every occurrence of a
    keyword contributes.
    """
    keywords = event_keywords(event) if _keywords is None else _keywords
    stream = _tokens if _tokens is not None else split_article(article)
    total = 0.0
    for token in stream.window(window):
        if token.norm in keywords:
            total += tfidf_imt(token.norm, article.iptc_codes, stats)
    return total


def map_article(
    article: NewsArticle,
    candidates: Iterable[KbEvent],
    stats: ImtStats,
    threshold: float = 0.04,
    window: int | None = None,
    aliases: Mapping[str, Sequence[str]] | None = None,
) -> Optional[MappingResult]:
    """Map one article to its best-scoring candidate event, if any.

    Candidates failing either gate are skipped; scores must strictly exceed
    ``threshold``. Candidates are ranked by score with qid as tie-break, so
    input order does not matter.
    """
    tokens = split_article(article)
    best: Optional[tuple[float, str]] = None
    for event in sorted(candidates, key=lambda e: e.qid):
        if not date_match(article, event):
            continue
        if not location_match(article, event, aliases=aliases, _tokens=tokens):
            continue
        score = subject_score(article, event, stats, window, _tokens=tokens)
        if score <= threshold:
            continue
        if best is None or score > best[0]:
            best = (score, event.qid)
    if best is None:
        return None
    return MappingResult(
        article_id=article.id, qid=best[1], score=best[0], window=window_label(window)
    )


def _scores(tp: int, fp: int, fn: int) -> WindowScores:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision and recall else 0.0
    return WindowScores(precision=precision, recall=recall, f1=f1, tp=tp, fp=fp, fn=fn)


def evaluate(predictions: Iterable[MappingResult], gold: GoldStandard) -> EvalReport:
    """Precision / recall / F1 of predicted pairs against the gold standard.

    Scores are computed independently per sentence window; windows with no
    predictions score zero precision and recall.
    """
    if not gold.pairs:
        raise ValueError("gold standard is empty")
    by_window: dict[str, set[tuple[str, str]]] = {}
    for result in predictions:
        by_window.setdefault(result.window, set()).add((result.article_id, result.qid))
    report = {}
    for label in ("3", "5", "all"):
        predicted = by_window.get(label, set())
        tp = len(predicted & gold.pairs)
        report[label] = _scores(tp=tp, fp=len(predicted) - tp, fn=len(gold.pairs) - tp)
    for label in sorted(set(by_window) - {"3", "5", "all"}):
        predicted = by_window[label]
        tp = len(predicted & gold.pairs)
        report[label] = _scores(tp=tp, fp=len(predicted) - tp, fn=len(gold.pairs) - tp)
    return EvalReport(per_window=report)


def load_gold_standard(lines: Iterable[str]) -> GoldStandard:
    """Parse the gold TSV: ``article_id<TAB>qid``, ``#`` comments allowed."""
    pairs = set()
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"gold standard line {number}: expected article_id<TAB>qid")
        pairs.add((parts[0], parts[1]))
    return GoldStandard(pairs=frozenset(pairs))
