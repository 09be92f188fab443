"""Link articles to knowledge-base events and score the result.

An article maps to an event only when the date gate, the location gate and
the topic-weighted subject score all agree. Run from the repository root.
"""

from datetime import date
from pathlib import Path

from newsevents.annotate import load_alias_table
from newsevents.corpus import read_articles_jsonl
from newsevents.kb import event_keywords, filter_by_period, load_events
from newsevents.mapping import evaluate, load_gold_standard, map_article
from newsevents.stats import build_imt_stats

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

articles = read_articles_jsonl((FIXTURES / "articles.jsonl").read_text().splitlines())
events = load_events((FIXTURES / "events.jsonl").read_text().splitlines())
events = filter_by_period(events, date(2004, 1, 1), date(2017, 12, 31))
aliases = load_alias_table((FIXTURES / "aliases.json").read_text())
print(f"{len(articles)} articles, {len(events)} events in the 2004-2017 window")

germanwings = events.get("Q19671417")
print("\nevent keywords for", germanwings.label, "->", sorted(event_keywords(germanwings)))

stats = build_imt_stats(articles)
print(f"\ntopic statistics over {stats.n_imts} IPTC codes")

mapped = []
for article in articles:
    result = map_article(article, events, stats, threshold=0.04, aliases=aliases)
    if result:
        mapped.append(result)
        print(f"  {article.id[:28]:30} -> {result.qid:10} score {result.score:7.2f}")
print(f"{len(mapped)} of {len(articles)} articles mapped "
      "(reaction pieces and off-topic stories stay unmapped by design)")

gold = load_gold_standard((FIXTURES / "gold.tsv").read_text().splitlines())
report = evaluate(mapped, gold).per_window["all"]
print(f"\nagainst the gold standard: P={report.precision:.2f} "
      f"R={report.recall:.2f} F1={report.f1:.2f}")
