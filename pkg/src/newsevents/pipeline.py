"""Batch pipeline: stage orchestration, snapshots, reports.

Each stage reads its upstream snapshot from the workdir, does its work, and
writes a versioned snapshot plus a human-readable report. Snapshots are
deterministic (sorted collections, no timestamps) so identical inputs and
config produce byte-identical files; reports carry timings and are exempt.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Optional

from . import annotate as annotate_mod
from . import clustering as cluster_mod
from .config import PipelineConfig
from .corpus import NewsArticle, parse_article_jsonl, parse_newsml, split_article
from .embeddings import EmbeddingTable, load_embeddings
from .gazetteer import load_default_recognizer
from .kb import EventCollection, KbEvent, load_events, filter_by_period, parse_event
from .mapping import (
    WINDOWS,
    MappingResult,
    evaluate,
    load_gold_standard,
    map_article,
    parse_window,
)
from .rdf import parse_ntriples, to_ntriples, to_turtle
from .stats import (
    ImtStats,
    build_imt_stats,
    build_imt_vocab_stats,
    build_wet_stats,
    imt_stats_from_dict,
    imt_stats_to_dict,
)
from .store import ArticleRecord, SearchEngine, TripleStore

SNAPSHOT_VERSION = 1

STAGE_FILES = {
    "ingest-articles": "articles.json",
    "ingest-events": "events.json",
    "build-stats": "stats.json",
    "map": "mappings.json",
    "cluster": "clusters.json",
    "annotate": "annotations.json",
    "export-rdf": "graph.nt",
    "evaluate": "eval.json",
}


class PipelineError(Exception):
    """Data-level pipeline failure (missing snapshots, bad inputs)."""


class MissingSnapshotError(PipelineError):
    def __init__(self, stage: str, path: Path):
        super().__init__(f"missing {path.name} snapshot: run {stage} first")
        self.stage = stage


# ---------------------------------------------------------------------------
# Snapshot (de)serialization


def article_to_dict(article: NewsArticle) -> dict:
    record = {
        "id": article.id,
        "headline": article.headline,
        "created": article.created.isoformat().replace("+00:00", "Z"),
        "iptc": list(article.iptc_codes),
        "slugs": list(article.slugs),
        "body": list(article.paragraphs),
    }
    if article.dateline is not None:
        record["dateline"] = article.dateline
    return record


def article_from_dict(record: dict) -> NewsArticle:
    return parse_article_jsonl(json.dumps(record))


def claim_to_dict(claim) -> dict:
    record = {"pid": claim.pid, "label": claim.label, "kind": claim.kind}
    if claim.kind == "item":
        record["value"] = {"qid": claim.value_qid, "label": claim.value}
    else:
        record["value"] = claim.value
    if claim.unit is not None:
        record["unit"] = claim.unit
    return record


def event_to_dict(event: KbEvent) -> dict:
    record = {
        "qid": event.qid,
        "label": event.label,
        "aliases": list(event.aliases),
        "instance_of": [{"qid": q, "label": l} for q, l in event.wets],
        "country": list(event.countries),
        "location": list(event.locations),
        "claims": [claim_to_dict(c) for c in event.claims],
    }
    if event.point_in_time:
        record["point_in_time"] = event.point_in_time.isoformat()
    if event.start_time:
        record["start_time"] = event.start_time.isoformat()
    if event.end_time:
        record["end_time"] = event.end_time.isoformat()
    return record


def _dump_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def _snapshot_payload(stage: str, body: dict) -> dict:
    return {"version": SNAPSHOT_VERSION, "stage": stage, **body}


def _load_snapshot(workdir: Path, stage: str) -> dict:
    path = workdir / STAGE_FILES[stage]
    if not path.exists():
        raise MissingSnapshotError(stage, path)
    payload = json.loads(path.read_text("utf-8"))
    version = payload.get("version")
    if version != SNAPSHOT_VERSION:
        raise PipelineError(
            f"{path.name}: snapshot version {version} != expected {SNAPSHOT_VERSION}"
        )
    return payload


@dataclass
class StageReport:
    stage: str
    counts: dict
    notes: list[str]
    elapsed_seconds: float

    def to_text(self) -> str:
        lines = [f"stage: {self.stage}", f"elapsed: {self.elapsed_seconds:.3f}s"]
        for key in sorted(self.counts):
            lines.append(f"{key}: {self.counts[key]}")
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines) + "\n"


def _write_report(workdir: Path, report: StageReport) -> None:
    reports = workdir / "reports"
    reports.mkdir(parents=True, exist_ok=True)
    with (reports / f"{report.stage}.json").open("w", encoding="utf-8") as handle:
        json.dump(
            {
                "stage": report.stage,
                "counts": report.counts,
                "notes": report.notes,
                "elapsed_seconds": report.elapsed_seconds,
            },
            handle,
            ensure_ascii=False,
            sort_keys=True,
            indent=2,
        )
        handle.write("\n")
    (reports / f"{report.stage}.txt").write_text(report.to_text(), "utf-8")


# ---------------------------------------------------------------------------
# Pipeline


class Pipeline:
    def __init__(self, config: PipelineConfig):
        config.validate()
        self.config = config
        self.workdir = config.workdir()

    # -- helpers -----------------------------------------------------------

    def _timed(self, stage: str, counts: dict, notes: list[str], started: float) -> StageReport:
        report = StageReport(
            stage=stage,
            counts=counts,
            notes=notes,
            elapsed_seconds=time.perf_counter() - started,
        )
        _write_report(self.workdir, report)
        return report

    def _require_path(self, name: str) -> Path:
        value = getattr(self.config.paths, name)
        if not value:
            raise PipelineError(f"paths.{name} is not configured")
        path = Path(value)
        if not path.exists():
            raise PipelineError(f"paths.{name}: no such file or directory: {path}")
        return path

    def load_articles(self) -> list[NewsArticle]:
        payload = _load_snapshot(self.workdir, "ingest-articles")
        return [article_from_dict(r) for r in payload["articles"]]

    def load_event_collection(self) -> EventCollection:
        payload = _load_snapshot(self.workdir, "ingest-events")
        return EventCollection(events=[parse_event(r) for r in payload["events"]])

    def load_imt_stats(self) -> ImtStats:
        payload = _load_snapshot(self.workdir, "build-stats")
        return imt_stats_from_dict(payload["imt_stats"])

    def load_mappings(self) -> list[MappingResult]:
        payload = _load_snapshot(self.workdir, "map")
        return [
            MappingResult(
                article_id=m["article_id"], qid=m["qid"], score=m["score"], window=m["window"]
            )
            for m in payload["mappings"]
        ]

    def load_clusters(self) -> list[cluster_mod.SchemaCluster]:
        payload = _load_snapshot(self.workdir, "cluster")
        clusters = []
        for record in payload["clusters"]:
            cluster = cluster_mod.SchemaCluster(
                schema_id=record["schema_id"],
                label=record["label"],
                wets=tuple(record["wets"]),
            )
            cluster.filters = [
                cluster_mod.FilterProperty(
                    pid=f["pid"],
                    label=f["label"],
                    kind=f["kind"],
                    coverage=f["coverage"],
                    range_filterable=f["kind"] == "quantity",
                )
                for f in record["filters"]
            ]
            clusters.append(cluster)
        return clusters

    def load_annotations(self) -> list[annotate_mod.Annotation]:
        payload = _load_snapshot(self.workdir, "annotate")
        return [
            annotate_mod.Annotation(
                article_id=a["article_id"],
                pid=a["pid"],
                label=a["label"],
                kind=a["kind"],
                surface=a["surface"],
                sentence=a["sentence"],
                start=a["start"],
                end=a["end"],
                value=a["value"],
                context_score=a.get("context_score"),
            )
            for a in payload["annotations"]
        ]

    def _load_embedding_table(self) -> EmbeddingTable:
        path = self._require_path("embeddings")
        with path.open("r", encoding="utf-8") as handle:
            return load_embeddings(handle)

    def _load_aliases(self) -> dict[str, list[str]]:
        if not self.config.paths.aliases:
            return {}
        path = self._require_path("aliases")
        return annotate_mod.load_alias_table(path.read_text("utf-8"))

    # -- stages ------------------------------------------------------------

    def ingest_articles(self) -> StageReport:
        started = time.perf_counter()
        path = self._require_path("articles")
        articles: list[NewsArticle] = []
        if path.is_dir():
            for xml_path in sorted(path.glob("*.xml")):
                articles.append(parse_newsml(xml_path.read_bytes()))
        elif path.suffix == ".xml":
            articles.append(parse_newsml(path.read_bytes()))
        else:
            with path.open("r", encoding="utf-8") as handle:
                for number, line in enumerate(handle, start=1):
                    if line.strip():
                        articles.append(parse_article_jsonl(line))
        seen = set()
        for article in articles:
            if article.id in seen:
                raise PipelineError(f"duplicate article id {article.id!r}")
            seen.add(article.id)
        articles.sort(key=lambda a: a.id)
        _dump_json(
            self.workdir / STAGE_FILES["ingest-articles"],
            _snapshot_payload(
                "ingest-articles", {"articles": [article_to_dict(a) for a in articles]}
            ),
        )
        return self._timed("ingest-articles", {"articles": len(articles)}, [], started)

    def ingest_events(self) -> StageReport:
        started = time.perf_counter()
        path = self._require_path("events")
        with path.open("r", encoding="utf-8") as handle:
            collection = load_events(handle)
        notes = [f"line {r.line_number}: {r.reason}" for r in collection.rejects]
        period = self.config.events
        if period.period_start and period.period_end:
            collection = filter_by_period(
                collection,
                date.fromisoformat(period.period_start),
                date.fromisoformat(period.period_end),
            )
        else:
            collection = EventCollection(
                events=[e for e in collection if e.has_usable_date()],
                rejects=list(collection.rejects),
            )
        events = sorted(collection.events, key=lambda e: e.qid)
        _dump_json(
            self.workdir / STAGE_FILES["ingest-events"],
            _snapshot_payload("ingest-events", {"events": [event_to_dict(e) for e in events]}),
        )
        counts = {"events": len(events), "rejects": len(collection.rejects)}
        return self._timed("ingest-events", counts, notes, started)

    def build_stats(self) -> StageReport:
        started = time.perf_counter()
        articles = self.load_articles()
        stats = build_imt_stats(articles)
        _dump_json(
            self.workdir / STAGE_FILES["build-stats"],
            _snapshot_payload("build-stats", {"imt_stats": imt_stats_to_dict(stats)}),
        )
        counts = {"articles": len(articles), "imts": stats.n_imts, "tokens": len(stats.tf)}
        return self._timed("build-stats", counts, [], started)

    def map_articles(self) -> StageReport:
        started = time.perf_counter()
        articles = self.load_articles()
        events = self.load_event_collection()
        stats = self.load_imt_stats()
        aliases = self._load_aliases()
        window = parse_window(self.config.mapping.window)
        threshold = self.config.mapping.threshold
        results = []
        for article in articles:
            result = map_article(
                article, events, stats, threshold=threshold, window=window, aliases=aliases
            )
            if result is not None:
                results.append(result)
        results.sort(key=lambda r: r.article_id)
        records = [
            {"article_id": r.article_id, "qid": r.qid, "score": r.score, "window": r.window}
            for r in results
        ]
        _dump_json(
            self.workdir / STAGE_FILES["map"],
            _snapshot_payload(
                "map", {"threshold": threshold, "window": self.config.mapping.window, "mappings": records}
            ),
        )
        with (self.workdir / "mappings.jsonl").open("w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        counts = {"articles": len(articles), "mapped": len(results)}
        return self._timed("map", counts, [], started)

    def cluster(self) -> StageReport:
        started = time.perf_counter()
        articles = self.load_articles()
        events = self.load_event_collection()
        mappings = self.load_mappings()
        table = self._load_embedding_table()
        recognizer = load_default_recognizer()

        article_events = {m.article_id: m.qid for m in mappings}
        event_wets = {e.qid: list(e.wet_qids()) for e in events}
        wet_stats = build_wet_stats(articles, article_events, event_wets)
        imt_vocab = build_imt_vocab_stats(articles, article_events, event_wets)
        wet_labels = {}
        for event in events:
            for qid, label in event.wets:
                if qid in wet_stats.tf:
                    wet_labels.setdefault(qid, label)
        reps, skipped = cluster_mod.build_representations(
            wet_labels, table, recognizer, wet_stats, imt_vocab
        )
        if len(reps) < 2:
            raise PipelineError(
                f"clustering needs at least 2 mapped event types, got {len(reps)}"
            )
        weights = cluster_mod.SimilarityWeights(
            alpha=self.config.clustering.alpha,
            beta=self.config.clustering.beta,
            gamma=self.config.clustering.gamma,
        )
        dendrogram = cluster_mod.ward_cluster(reps, weights)
        if self.config.clustering.cut == "fixed":
            threshold = self.config.clustering.fixed_threshold
        else:
            threshold = cluster_mod.find_elbow_threshold(
                dendrogram, fallback=self.config.clustering.fixed_threshold
            )
        clusters = cluster_mod.cut_dendrogram(dendrogram, threshold, wet_labels, recognizer)
        for cluster in clusters:
            cluster.filters = cluster_mod.derive_schema_filters(
                cluster, list(events), min_coverage=self.config.clustering.min_filter_coverage
            )
        cluster_records = [
            {
                "schema_id": c.schema_id,
                "label": c.label,
                "wets": list(c.wets),
                "filters": [
                    {"pid": f.pid, "label": f.label, "kind": f.kind, "coverage": f.coverage}
                    for f in c.filters
                ],
            }
            for c in clusters
        ]
        _dump_json(
            self.workdir / STAGE_FILES["cluster"],
            _snapshot_payload(
                "cluster",
                {
                    "cut": self.config.clustering.cut,
                    "threshold": threshold,
                    "clusters": cluster_records,
                    "skipped": sorted(skipped),
                },
            ),
        )
        (self.workdir / "dendrogram.txt").write_text(
            "\n".join(dendrogram.to_merge_lines()) + "\n", "utf-8"
        )
        counts = {
            "event_types": len(reps),
            "clusters": len(clusters),
            "skipped_types": len(skipped),
        }
        return self._timed("cluster", counts, sorted(skipped), started)

    def _schema_by_wet(self, clusters) -> dict[str, str]:
        return {wet: c.schema_id for c in clusters for wet in c.wets}

    def _article_schema(self, event: KbEvent, schema_by_wet: dict[str, str]) -> Optional[str]:
        for qid in event.wet_qids():
            if qid in schema_by_wet:
                return schema_by_wet[qid]
        return None

    def annotate(self) -> StageReport:
        started = time.perf_counter()
        articles = {a.id: a for a in self.load_articles()}
        events = self.load_event_collection()
        mappings = self.load_mappings()
        table = self._load_embedding_table()
        aliases = self._load_aliases()
        annotations = []
        for mapping in sorted(mappings, key=lambda m: m.article_id):
            article = articles[mapping.article_id]
            event = events.get(mapping.qid)
            annotations.extend(
                annotate_mod.annotate_article(
                    article,
                    event,
                    table,
                    aliases=aliases,
                    tolerance=self.config.annotation.quantity_tolerance,
                    max_sentences=self.config.annotation.max_sentence,
                )
            )
        records = [a.to_dict() for a in annotations]
        _dump_json(
            self.workdir / STAGE_FILES["annotate"],
            _snapshot_payload("annotate", {"annotations": records}),
        )
        with (self.workdir / "annotations.jsonl").open("w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
        counts = {
            "mapped_articles": len(mappings),
            "annotations": len(annotations),
            "quantity_annotations": sum(1 for a in annotations if a.kind == "quantity"),
        }
        return self._timed("annotate", counts, [], started)

    def export_rdf(self) -> StageReport:
        started = time.perf_counter()
        articles = self.load_articles()
        events = self.load_event_collection()
        mappings = {m.article_id: m for m in self.load_mappings()}
        clusters = self.load_clusters()
        annotations = self.load_annotations()
        schema_by_wet = self._schema_by_wet(clusters)
        by_article: dict[str, list] = {}
        for annotation in annotations:
            by_article.setdefault(annotation.article_id, []).append(annotation)
        triples = []
        for article in articles:
            mapping = mappings.get(article.id)
            event = events.get(mapping.qid) if mapping else None
            schema_id = self._article_schema(event, schema_by_wet) if event else None
            triples.extend(
                annotate_mod.serialize_rdf(
                    article,
                    event,
                    by_article.get(article.id, []),
                    schema_id,
                    base=self.config.rdf.base,
                )
            )
        text = to_ntriples(triples)
        (self.workdir / "graph.nt").write_text(text, "utf-8")
        (self.workdir / "graph.ttl").write_text(to_turtle(triples), "utf-8")
        counts = {"articles": len(articles), "triples": len(triples)}
        return self._timed("export-rdf", counts, [], started)

    def evaluate_mapping(self, gold_path: str | Path) -> StageReport:
        started = time.perf_counter()
        path = Path(gold_path)
        if not path.exists():
            raise PipelineError(f"gold standard not found: {path}")
        with path.open("r", encoding="utf-8") as handle:
            gold = load_gold_standard(handle)
        articles = [a for a in self.load_articles() if a.id in gold.article_ids()]
        events = self.load_event_collection()
        stats = self.load_imt_stats()
        aliases = self._load_aliases()
        predictions = []
        for window in WINDOWS:
            for article in articles:
                result = map_article(
                    article,
                    events,
                    stats,
                    threshold=self.config.mapping.threshold,
                    window=window,
                    aliases=aliases,
                )
                if result is not None:
                    predictions.append(result)
        report = evaluate(predictions, gold)
        _dump_json(
            self.workdir / STAGE_FILES["evaluate"],
            _snapshot_payload("evaluate", {"windows": report.to_dict(), "gold_pairs": len(gold)}),
        )
        counts = {"gold_pairs": len(gold), "gold_articles": len(articles)}
        notes = [
            f"window {label}: P={ws.precision:.3f} R={ws.recall:.3f} F1={ws.f1:.3f}"
            for label, ws in sorted(report.per_window.items())
        ]
        return self._timed("evaluate", counts, notes, started)

    # -- serving -----------------------------------------------------------

    def build_engine(self) -> SearchEngine:
        """Assemble the read-only search engine from the final snapshots."""
        articles = self.load_articles()
        events = self.load_event_collection()
        mappings = {m.article_id: m for m in self.load_mappings()}
        clusters = self.load_clusters()
        annotations = self.load_annotations()
        graph_path = self.workdir / "graph.nt"
        if not graph_path.exists():
            raise MissingSnapshotError("export-rdf", graph_path)
        store = TripleStore()
        store.insert(parse_ntriples(graph_path.read_text("utf-8")))
        store.freeze()
        recognizer = load_default_recognizer()
        schema_by_wet = self._schema_by_wet(clusters)
        by_article: dict[str, list] = {}
        for annotation in annotations:
            by_article.setdefault(annotation.article_id, []).append(annotation)
        records = []
        for article in articles:
            mapping = mappings.get(article.id)
            event = events.get(mapping.qid) if mapping else None
            records.append(
                ArticleRecord(
                    article=article,
                    event_qid=event.qid if event else None,
                    schema_id=self._article_schema(event, schema_by_wet) if event else None,
                    mapping_score=mapping.score if mapping else None,
                    annotations=by_article.get(article.id, []),
                    entities=recognizer.recognize(split_article(article)),
                )
            )
        return SearchEngine(
            records=records,
            events={e.qid: e for e in events},
            schemas=clusters,
            store=store,
        )

    def run_all(self, gold_path: str | Path | None = None) -> list[StageReport]:
        reports = [
            self.ingest_articles(),
            self.ingest_events(),
            self.build_stats(),
            self.map_articles(),
            self.cluster(),
            self.annotate(),
            self.export_rdf(),
        ]
        if gold_path is not None:
            reports.append(self.evaluate_mapping(gold_path))
        return reports
