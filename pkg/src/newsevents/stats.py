"""The three tf.idf statistics families behind mapping and clustering.

All three weightings share the same shape, ``tf * ln(base_count / df)``,
with a raw occurrence count as tf and natural log as the (undocumented
upstream) log base. Tokens are the corpus tokenizer's normalized forms;
stopwords stay in (keyword sets are already stopword-free, so gating
happens there, not here).

* topic stats: per (token, IPTC media topic) counts over whole articles;
* type stats: per (token, event type) counts over "type documents", the
  concatenation of every article mapped to an event of that type;
* topic-vocabulary stats: per (IPTC code, event type) article counts, the
  coarse vocabulary used to steer the clustering stop decision.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .corpus import NewsArticle, split_article


@dataclass
class ImtStats:
    """Token counts keyed by IPTC media topic.

    ``tf[token][imt]`` is the number of occurrences of the token across all
    articles carrying that IMT; ``df(token)`` (the number of IMTs whose
    articles contain the token) is the entry count of ``tf[token]``.
    """

    n_imts: int
    tf: dict[str, dict[str, int]] = field(default_factory=dict)

    def df(self, token: str) -> int:
        return len(self.tf.get(token, ()))


@dataclass
class WetStats:
    """Token counts over per-event-type documents."""

    n_wets: int
    tf: dict[str, dict[str, int]] = field(default_factory=dict)  # wet -> token -> count
    df: dict[str, int] = field(default_factory=dict)  # token -> #type documents


@dataclass
class ImtVocabStats:
    """IPTC-code counts per event type (articles as counting unit)."""

    n_wets: int
    tf: dict[str, dict[str, int]] = field(default_factory=dict)  # wet -> imt -> count
    df: dict[str, int] = field(default_factory=dict)  # imt -> #types


def _article_token_counts(article: NewsArticle) -> Counter:
    return Counter(split_article(article).norms())


def build_imt_stats(corpus: Sequence[NewsArticle]) -> ImtStats:
    """Count every article's tokens once per IPTC code the article carries."""
    if not corpus:
        raise ValueError("cannot build stats over an empty corpus")
    tf: dict[str, dict[str, int]] = {}
    imts = set()
    for article in corpus:
        counts = _article_token_counts(article)
        codes = set(article.iptc_codes)
        imts.update(codes)
        for token, count in counts.items():
            per_imt = tf.setdefault(token, {})
            for code in codes:
                per_imt[code] = per_imt.get(code, 0) + count
    return ImtStats(n_imts=len(imts), tf=tf)


def tfidf_imt(token: str, imts: Iterable[str], stats: ImtStats) -> float:
    """Topic-based weight of a token for an article carrying ``imts``.

    The tf is the highest per-topic count among the article's own topics;
    unseen tokens weigh 0, and so does any token present under every topic
    (log N/df = 0).
    """
    per_imt = stats.tf.get(token)
    if not per_imt:
        return 0.0
    tf = max((per_imt.get(code, 0) for code in imts), default=0)
    if tf == 0:
        return 0.0
    return tf * math.log(stats.n_imts / len(per_imt))


def build_wet_stats(
    corpus: Sequence[NewsArticle],
    article_events: Mapping[str, str],
    event_wets: Mapping[str, Sequence[str]],
) -> WetStats:
    """Build per-type token stats from mapping results.

    ``article_events`` maps article id -> event qid; ``event_wets`` maps
    event qid -> its type qids. A type document is the concatenation of all
    articles mapped to events of that type; types with zero mapped articles
    do not exist here and do not count toward the total.
    """
    tf: dict[str, dict[str, int]] = {}
    for article in corpus:
        qid = article_events.get(article.id)
        if qid is None:
            continue
        wets = event_wets.get(qid, ())
        if not wets:
            continue
        counts = _article_token_counts(article)
        for wet in set(wets):
            doc = tf.setdefault(wet, {})
            for token, count in counts.items():
                doc[token] = doc.get(token, 0) + count
    df: dict[str, int] = {}
    for doc in tf.values():
        for token in doc:
            df[token] = df.get(token, 0) + 1
    return WetStats(n_wets=len(tf), tf=tf, df=df)


def tfidf_wet(token: str, wet: str, stats: WetStats) -> float:
    tf = stats.tf.get(wet, {}).get(token, 0)
    df = stats.df.get(token, 0)
    if tf == 0 or df == 0:
        return 0.0
    return tf * math.log(stats.n_wets / df)


def build_imt_vocab_stats(
    corpus: Sequence[NewsArticle],
    article_events: Mapping[str, str],
    event_wets: Mapping[str, Sequence[str]],
) -> ImtVocabStats:
    """Count, per event type, how many mapped articles carry each IPTC code."""
    tf: dict[str, dict[str, int]] = {}
    for article in corpus:
        qid = article_events.get(article.id)
        if qid is None:
            continue
        wets = event_wets.get(qid, ())
        for wet in set(wets):
            doc = tf.setdefault(wet, {})
            for code in set(article.iptc_codes):
                doc[code] = doc.get(code, 0) + 1
    df: dict[str, int] = {}
    for doc in tf.values():
        for code in doc:
            df[code] = df.get(code, 0) + 1
    return ImtVocabStats(n_wets=len(tf), tf=tf, df=df)


def tfidf_imt_vocab(imt: str, wet: str, stats: ImtVocabStats) -> float:
    tf = stats.tf.get(wet, {}).get(imt, 0)
    df = stats.df.get(imt, 0)
    if tf == 0 or df == 0:
        return 0.0
    return tf * math.log(stats.n_wets / df)


# ---------------------------------------------------------------------------
# Snapshot form (JSON-friendly dicts, versioned by the pipeline layer)


def imt_stats_to_dict(stats: ImtStats) -> dict:
    return {"n_imts": stats.n_imts, "tf": stats.tf}


def imt_stats_from_dict(payload: dict) -> ImtStats:
    return ImtStats(n_imts=int(payload["n_imts"]), tf=payload["tf"])
