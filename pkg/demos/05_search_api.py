"""Faceted search over the finished pipeline: keywords + structured filters.

Runs the batch pipeline into a scratch directory, then queries the search
engine the same way the HTTP API does. To serve the same data over HTTP:

    newsevents --config fixtures/pipeline.toml --workdir /tmp/newsevents run
    newsevents --config fixtures/pipeline.toml serve --snapshot /tmp/newsevents --port 8080
"""

import tempfile
from datetime import date
from pathlib import Path

from newsevents.config import apply_overrides, load_config
from newsevents.pipeline import Pipeline
from newsevents.store import PropertyFilter, SearchQuery

ROOT = Path(__file__).resolve().parent.parent

workdir = tempfile.mkdtemp(prefix="newsevents-demo-")
config = apply_overrides(load_config(ROOT / "fixtures" / "pipeline.toml"),
                         paths__workdir=workdir)
pipeline = Pipeline(config)
pipeline.run_all()
engine = pipeline.build_engine()

print("schemas on offer:")
for schema in engine.schema_list():
    print(f"  {schema['schema_id']}: {schema['label']} "
          f"({schema['wet_count']} types, {schema['article_count']} articles)")

crash = next(s["schema_id"] for s in engine.schema_list() if "aviation" in s["label"])

print("\nplane-crash articles with at least 50 victims:")
result = engine.search(SearchQuery(schema_id=crash,
                                   filters=(PropertyFilter("P1120", "gte", 50),)))
for hit in result.hits:
    print(f"  {hit.created[:10]}  {hit.headline}")

print("\n... and with at least 200 victims:")
result = engine.search(SearchQuery(schema_id=crash,
                                   filters=(PropertyFilter("P1120", "gte", 200),)))
print("  (no hits)" if result.total == 0 else result.hits)

print("\nanything in France on 24 March 2015:")
result = engine.search(SearchQuery(date_from=date(2015, 3, 24),
                                   date_to=date(2015, 3, 24), location="France"))
for hit in result.hits:
    print(f"  {hit.article_id}: {hit.headline}")

print("\nkeyword search 'germanwings crash':")
for hit in engine.search(SearchQuery(keywords="germanwings crash")).hits:
    print(f"  score {hit.score:5.2f}  {hit.headline}")
    print(f"              {hit.snippet[:80]}")

detail = engine.article_detail(result.hits[0].article_id)
print(f"\ndetail view carries {len(detail['annotations'])} annotations and "
      f"{len(detail['entities'])} infobox entities; linked event {detail['event_qid']}")
