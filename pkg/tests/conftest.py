"""Shared fixtures: paths to the bundled sample corpus and a built pipeline."""

from __future__ import annotations

from pathlib import Path

import pytest

from newsevents.config import apply_overrides, load_config
from newsevents.corpus import read_articles_jsonl
from newsevents.embeddings import load_embeddings
from newsevents.kb import load_events
from newsevents.pipeline import Pipeline

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_articles():
    with (FIXTURES / "articles.jsonl").open(encoding="utf-8") as handle:
        return read_articles_jsonl(handle)


@pytest.fixture(scope="session")
def fixture_events():
    with (FIXTURES / "events.jsonl").open(encoding="utf-8") as handle:
        return load_events(handle)


@pytest.fixture(scope="session")
def fixture_embeddings():
    with (FIXTURES / "embeddings.txt").open(encoding="utf-8") as handle:
        return load_embeddings(handle)


@pytest.fixture(scope="session")
def fixture_config(tmp_path_factory):
    workdir = tmp_path_factory.mktemp("pipeline-workdir")
    config = load_config(FIXTURES / "pipeline.toml")
    return apply_overrides(
        config,
        paths__articles=str(FIXTURES / "articles.jsonl"),
        paths__events=str(FIXTURES / "events.jsonl"),
        paths__embeddings=str(FIXTURES / "embeddings.txt"),
        paths__aliases=str(FIXTURES / "aliases.json"),
        paths__taxonomy=str(FIXTURES / "iptc.csv"),
        paths__workdir=str(workdir),
    )


@pytest.fixture(scope="session")
def built_pipeline(fixture_config):
    """The sample corpus pipeline, run once per session."""
    pipeline = Pipeline(fixture_config)
    pipeline.run_all(gold_path=FIXTURES / "gold.tsv")
    return pipeline


@pytest.fixture(scope="session")
def engine(built_pipeline):
    return built_pipeline.build_engine()
