"""Pipeline configuration: file format, defaults, validation.

The config file uses plain ``[section]`` / ``key = value`` syntax (read
with :mod:`configparser`); command-line flags override file values, which
override the built-in defaults. Validation happens before any stage runs.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

SNAPSHOT_ENV_VAR = "NEWSEVENTS_WORKDIR"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class PathsConfig:
    articles: Optional[str] = None
    events: Optional[str] = None
    embeddings: Optional[str] = None
    aliases: Optional[str] = None
    taxonomy: Optional[str] = None
    workdir: str = "workdir"


@dataclass(frozen=True)
class MappingConfig:
    threshold: float = 0.04
    window: str = "all"  # "3" | "5" | "all"


@dataclass(frozen=True)
class EventsConfig:
    period_start: Optional[str] = None  # YYYY-MM-DD; both unset = keep all dated events
    period_end: Optional[str] = None


@dataclass(frozen=True)
class ClusteringConfig:
    alpha: float = 0.38
    beta: float = 0.57
    gamma: float = 0.05
    cut: str = "elbow"  # "elbow" | "fixed"
    fixed_threshold: float = 0.23
    min_filter_coverage: float = 0.2


@dataclass(frozen=True)
class AnnotationConfig:
    quantity_tolerance: float = 0.10
    max_sentence: int = 5


@dataclass(frozen=True)
class RdfConfig:
    base: str = "http://example.org"  # IRI base for /news/<id> and /event/<id>


@dataclass(frozen=True)
class ServeConfig:
    port: int = 8080
    snapshot: Optional[str] = None  # workdir to serve from; falls back to paths.workdir


@dataclass(frozen=True)
class PipelineConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    mapping: MappingConfig = field(default_factory=MappingConfig)
    events: EventsConfig = field(default_factory=EventsConfig)
    clustering: ClusteringConfig = field(default_factory=ClusteringConfig)
    annotation: AnnotationConfig = field(default_factory=AnnotationConfig)
    rdf: RdfConfig = field(default_factory=RdfConfig)
    serve: ServeConfig = field(default_factory=ServeConfig)

    def validate(self) -> None:
        c = self.clustering
        if abs(c.alpha + c.beta + c.gamma - 1.0) > 1e-9:
            raise ConfigError(
                f"clustering weights must sum to 1 (got {c.alpha + c.beta + c.gamma})"
            )
        if c.cut not in ("elbow", "fixed"):
            raise ConfigError(f"clustering.cut must be 'elbow' or 'fixed', got {c.cut!r}")
        if not 0 < self.annotation.quantity_tolerance < 1:
            raise ConfigError("annotation.quantity_tolerance must be in (0, 1)")
        if self.annotation.max_sentence < 1:
            raise ConfigError("annotation.max_sentence must be >= 1")
        if self.mapping.threshold <= 0:
            raise ConfigError("mapping.threshold must be > 0")
        if self.mapping.window not in ("3", "5", "all"):
            raise ConfigError(f"mapping.window must be 3, 5 or all, got {self.mapping.window!r}")
        if not 0 <= c.min_filter_coverage <= 1:
            raise ConfigError("clustering.min_filter_coverage must be in [0, 1]")
        if not 1 <= self.serve.port <= 65535:
            raise ConfigError(f"serve.port out of range: {self.serve.port}")

    def workdir(self) -> Path:
        return Path(self.paths.workdir)


_SECTIONS = {
    "paths": (PathsConfig, str),
    "mapping": (MappingConfig, None),
    "events": (EventsConfig, str),
    "clustering": (ClusteringConfig, None),
    "annotation": (AnnotationConfig, None),
    "rdf": (RdfConfig, None),
    "serve": (ServeConfig, None),
}


def _coerce(name: str, raw: str, target_type: type) -> object:
    try:
        if target_type is float:
            return float(raw)
        if target_type is int:
            return int(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {target_type.__name__}")


def load_config(path: str | os.PathLike | None = None) -> PipelineConfig:
    """Read a config file over the defaults; missing file path is an error."""
    config = PipelineConfig()
    if path is None:
        return config
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"config file not found: {path}")
    for section_name, (section_type, _) in _SECTIONS.items():
        if not parser.has_section(section_name):
            continue
        current = getattr(config, section_name)
        updates = {}
        known = {f.name: f for f in fields(section_type)}
        for key, raw in parser.items(section_name):
            if key not in known:
                raise ConfigError(f"unknown config key [{section_name}] {key}")
            default = getattr(current, key)
            target = type(default) if default is not None else str
            if target is bool:
                raise ConfigError(f"[{section_name}] {key}: unsupported type")
            updates[key] = _coerce(f"[{section_name}] {key}", raw.strip(), target)
        config = replace(config, **{section_name: replace(current, **updates)})
    config.validate()
    return config


def apply_overrides(config: PipelineConfig, **dotted: object) -> PipelineConfig:
    """Apply ``section__key=value`` overrides (None values are ignored)."""
    for name, value in dotted.items():
        if value is None:
            continue
        section_name, _, key = name.partition("__")
        section = getattr(config, section_name)
        config = replace(config, **{section_name: replace(section, **{key: value})})
    config.validate()
    return config
