"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(missing snapshots, unreadable inputs).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from .config import SNAPSHOT_ENV_VAR, ConfigError, apply_overrides, load_config
from .corpus import CorpusError
from .kb import KbError
from .pipeline import Pipeline, PipelineError

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="newsevents", description=__doc__)
    parser.add_argument("--config", help="pipeline config file (section/key=value)")
    parser.add_argument("--workdir", help="override paths.workdir")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("ingest-articles", help="parse articles into the corpus snapshot")

    p = sub.add_parser("ingest-events", help="load events and apply the temporal window")
    p.add_argument("--period-start", help="YYYY-MM-DD")
    p.add_argument("--period-end", help="YYYY-MM-DD")

    sub.add_parser("build-stats", help="build topic tf.idf statistics")

    p = sub.add_parser("map", help="link articles to events")
    p.add_argument("--threshold", type=float, help="subject score threshold")
    p.add_argument("--window", choices=("3", "5", "all"), help="sentence window")

    p = sub.add_parser("cluster", help="cluster event types into schemas")
    p.add_argument("--cut", choices=("elbow", "fixed"), help="dendrogram cut strategy")
    p.add_argument("--fixed-threshold", type=float, help="cut height for --cut fixed (and elbow fallback)")
    p.add_argument("--min-filter-coverage", type=float, help="minimum property coverage")

    p = sub.add_parser("annotate", help="ground property values in article text")
    p.add_argument("--quantity-tolerance", type=float, help="relative quantity tolerance")
    p.add_argument("--max-sentence", type=int, help="sentence cutoff for quantities")

    sub.add_parser("export-rdf", help="serialize articles and annotations to N-Triples")

    p = sub.add_parser("evaluate", help="score the mapping against a gold standard")
    p.add_argument("--gold", help="gold standard TSV (article_id<TAB>qid)")

    p = sub.add_parser("serve", help="run the HTTP search service")
    p.add_argument("--port", type=int, help="listen port")
    p.add_argument("--snapshot", help="workdir containing the pipeline snapshots")

    p = sub.add_parser("run", help="run every batch stage in order")
    p.add_argument("--gold", help="also evaluate against this gold standard")
    return parser


def _configure(args: argparse.Namespace):
    config = load_config(args.config)
    overrides = {
        "paths__workdir": args.workdir,
        "events__period_start": getattr(args, "period_start", None),
        "events__period_end": getattr(args, "period_end", None),
        "mapping__threshold": getattr(args, "threshold", None),
        "mapping__window": getattr(args, "window", None),
        "clustering__cut": getattr(args, "cut", None),
        "clustering__fixed_threshold": getattr(args, "fixed_threshold", None),
        "clustering__min_filter_coverage": getattr(args, "min_filter_coverage", None),
        "annotation__quantity_tolerance": getattr(args, "quantity_tolerance", None),
        "annotation__max_sentence": getattr(args, "max_sentence", None),
        "serve__port": getattr(args, "port", None),
        "serve__snapshot": getattr(args, "snapshot", None),
    }
    return apply_overrides(config, **overrides)


def _print_report(report) -> None:
    print(report.to_text(), end="")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _configure(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        if args.command == "serve":
            workdir = (
                config.serve.snapshot
                or os.environ.get(SNAPSHOT_ENV_VAR)
                or config.paths.workdir
            )
            config = apply_overrides(config, paths__workdir=workdir)
            pipeline = Pipeline(config)
            engine = pipeline.build_engine()
            from .service import create_app
            import uvicorn

            app = create_app(engine)
            print(f"serving {len(engine.article_ids())} articles on port {config.serve.port}")
            uvicorn.run(app, host="127.0.0.1", port=config.serve.port, log_level="warning")
            return 0

        pipeline = Pipeline(config)
        if args.command == "ingest-articles":
            _print_report(pipeline.ingest_articles())
        elif args.command == "ingest-events":
            _print_report(pipeline.ingest_events())
        elif args.command == "build-stats":
            _print_report(pipeline.build_stats())
        elif args.command == "map":
            _print_report(pipeline.map_articles())
        elif args.command == "cluster":
            _print_report(pipeline.cluster())
        elif args.command == "annotate":
            _print_report(pipeline.annotate())
        elif args.command == "export-rdf":
            _print_report(pipeline.export_rdf())
        elif args.command == "evaluate":
            if not args.gold:
                print("evaluate: --gold PATH is required", file=sys.stderr)
                return 1
            _print_report(pipeline.evaluate_mapping(args.gold))
        elif args.command == "run":
            for report in pipeline.run_all(gold_path=args.gold):
                _print_report(report)
                print()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (PipelineError, CorpusError, KbError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
