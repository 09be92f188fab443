"""Cluster fine-grained event types into coarse, filterable schemas.

Each event type is represented three ways (genericized label embedding,
mapped-article content, topic codes); a weighted cosine mix drives Ward
agglomeration and an elbow cut picks the schema granularity.
"""

from datetime import date
from pathlib import Path

from newsevents.clustering import (
    SimilarityWeights,
    build_representations,
    derive_schema_filters,
    elbow_cut,
    ward_cluster,
)
from newsevents.corpus import read_articles_jsonl
from newsevents.embeddings import load_embeddings
from newsevents.gazetteer import load_default_recognizer
from newsevents.kb import filter_by_period, load_events
from newsevents.mapping import map_article
from newsevents.stats import build_imt_stats, build_imt_vocab_stats, build_wet_stats
from newsevents.annotate import load_alias_table

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

articles = read_articles_jsonl((FIXTURES / "articles.jsonl").read_text().splitlines())
events = filter_by_period(
    load_events((FIXTURES / "events.jsonl").read_text().splitlines()),
    date(2004, 1, 1), date(2017, 12, 31),
)
aliases = load_alias_table((FIXTURES / "aliases.json").read_text())
stats = build_imt_stats(articles)
mapping = {}
for article in articles:
    result = map_article(article, events, stats, aliases=aliases)
    if result:
        mapping[article.id] = result.qid

event_wets = {e.qid: list(e.wet_qids()) for e in events}
wet_stats = build_wet_stats(articles, mapping, event_wets)
imt_vocab = build_imt_vocab_stats(articles, mapping, event_wets)
labels = {q: l for e in events for q, l in e.wets if q in wet_stats.tf}

table = load_embeddings((FIXTURES / "embeddings.txt").read_text().splitlines())
recognizer = load_default_recognizer()
reps, skipped = build_representations(labels, table, recognizer, wet_stats, imt_vocab)
print(f"{len(reps)} event types with mapped articles; {len(skipped)} skipped")

dendrogram = ward_cluster(reps, SimilarityWeights(alpha=0.38, beta=0.57, gamma=0.05))
print("\nmerge list (id id height new-id):")
for line in dendrogram.to_merge_lines():
    print("  ", line)

threshold, clusters = elbow_cut(dendrogram, fallback=0.23,
                                wet_labels=labels, recognizer=recognizer)
print(f"\nelbow cut at {threshold:.3f} -> {len(clusters)} schemas")
for cluster in clusters:
    cluster.filters = derive_schema_filters(cluster, list(events))
    names = ", ".join(labels[w] for w in cluster.wets)
    print(f"  {cluster.schema_id}: '{cluster.label}' [{names}]")
    for f in cluster.filters:
        flag = "range" if f.range_filterable else "text"
        print(f"      filter {f.pid} ({f.label}) {flag}, coverage {f.coverage:.0%}")
