"""Knowledge-base event subset: loading, temporal filtering, keywords.

Events arrive as one JSON object per line (see :func:`load_events` for the
schema). Loading is tolerant: malformed lines land in a rejects report and
the load continues. The loaded collection is immutable afterwards.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Optional

from .corpus import tokenize

_QID_RE = re.compile(r"^Q[0-9]+$")

CLAIM_KINDS = ("quantity", "string", "item")


class KbError(Exception):
    """Raised for event records that violate the KB schema."""


@dataclass(frozen=True)
class Claim:
    """One property claim of an event.

    ``kind`` is one of quantity / string / item. Quantity claims carry a
    finite numeric ``value`` plus an optional ``unit``; string claims carry
    text; item claims carry the target item's label in ``value`` and its
    identifier in ``value_qid``.
    """

    pid: str
    label: str
    kind: str
    value: object
    unit: Optional[str] = None
    value_qid: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in CLAIM_KINDS:
            raise KbError(f"claim {self.pid}: unknown kind {self.kind!r}")
        if self.kind == "quantity":
            if not isinstance(self.value, (int, float)) or self.value != self.value:
                raise KbError(f"claim {self.pid}: quantity value must be finite, got {self.value!r}")
            if self.value in (float("inf"), float("-inf")):
                raise KbError(f"claim {self.pid}: quantity value must be finite")
        elif self.kind == "item":
            if not self.value_qid or not isinstance(self.value, str) or not self.value:
                raise KbError(f"claim {self.pid}: item claims need a label and a value_qid")

    @property
    def text_value(self) -> Optional[str]:
        """Searchable surface form for textual claims; None for quantities."""
        if self.kind == "quantity":
            return None
        return str(self.value)


@dataclass(frozen=True)
class KbEvent:
    """One knowledge-base event ("occurrence")."""

    qid: str
    label: str
    aliases: tuple[str, ...] = ()
    wets: tuple[tuple[str, str], ...] = ()
    point_in_time: Optional[date] = None
    start_time: Optional[date] = None
    end_time: Optional[date] = None
    countries: tuple[str, ...] = ()
    locations: tuple[str, ...] = ()
    claims: tuple[Claim, ...] = ()

    def __post_init__(self) -> None:
        if not _QID_RE.match(self.qid):
            raise KbError(f"invalid event qid {self.qid!r}")
        if not self.wets:
            raise KbError(f"event {self.qid}: at least one event type (instance_of) required")
        if self.start_time and self.end_time and self.start_time > self.end_time:
            raise KbError(f"event {self.qid}: start_time after end_time")

    def has_usable_date(self) -> bool:
        return self.point_in_time is not None or (
            self.start_time is not None and self.end_time is not None
        )

    def wet_qids(self) -> tuple[str, ...]:
        return tuple(qid for qid, _ in self.wets)


@dataclass(frozen=True)
class RejectRecord:
    line_number: int
    reason: str


@dataclass
class EventCollection:
    """Loaded events indexed by qid, plus load rejects."""

    events: list[KbEvent]
    rejects: list[RejectRecord] = field(default_factory=list)
    _index: dict[str, KbEvent] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._index = {e.qid: e for e in self.events}

    def __iter__(self) -> Iterator[KbEvent]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __contains__(self, qid: str) -> bool:
        return qid in self._index

    def get(self, qid: str) -> KbEvent:
        return self._index[qid]


def _parse_date(value: object, context: str) -> date:
    try:
        return date.fromisoformat(str(value))
    except ValueError as exc:
        raise KbError(f"{context}: invalid date {value!r} (expected YYYY-MM-DD)") from exc


def _parse_claim(raw: dict) -> Claim:
    if not isinstance(raw, dict) or "pid" not in raw or "kind" not in raw:
        raise KbError(f"claim must be an object with pid and kind, got {raw!r}")
    kind = raw["kind"]
    value = raw.get("value")
    value_qid = None
    if kind == "item" and isinstance(value, dict):
        value_qid = value.get("qid")
        value = value.get("label")
    if kind == "quantity" and isinstance(value, str):
        value = float(value)
    return Claim(
        pid=str(raw["pid"]),
        label=str(raw.get("label", "")),
        kind=str(kind),
        value=value,
        unit=raw.get("unit"),
        value_qid=value_qid or raw.get("value_qid"),
    )


def parse_event(record: dict) -> KbEvent:
    """Build a validated :class:`KbEvent` from one decoded JSON object."""
    if not isinstance(record, dict):
        raise KbError("event record must be a JSON object")
    for key in ("qid", "label", "instance_of"):
        if key not in record:
            raise KbError(f"missing field {key!r}")
    qid = str(record["qid"])
    wets = tuple(
        (str(w["qid"]), str(w["label"])) for w in record["instance_of"] if isinstance(w, dict)
    )
    pit = record.get("point_in_time")
    start = record.get("start_time")
    end = record.get("end_time")
    return KbEvent(
        qid=qid,
        label=str(record["label"]),
        aliases=tuple(str(a) for a in record.get("aliases", [])),
        wets=wets,
        point_in_time=_parse_date(pit, f"event {qid}") if pit else None,
        start_time=_parse_date(start, f"event {qid}") if start else None,
        end_time=_parse_date(end, f"event {qid}") if end else None,
        countries=tuple(str(c) for c in record.get("country", [])),
        locations=tuple(str(l) for l in record.get("location", [])),
        claims=tuple(_parse_claim(c) for c in record.get("claims", [])),
    )


def load_events(lines: Iterable[str]) -> EventCollection:
    """Load the event JSONL stream.

    Schema per line: ``{qid, label, aliases:[...], instance_of:[{qid,label}],
    point_in_time?, start_time?, end_time?, country:[...], location:[...],
    claims:[{pid,label,kind,value,unit?}]}`` with ``YYYY-MM-DD`` dates; item
    claim values are ``{qid,label}`` objects. Malformed lines are recorded as
    rejects (with their line number) and skipped.
    """
    events: list[KbEvent] = []
    rejects: list[RejectRecord] = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            events.append(parse_event(json.loads(line)))
        except (json.JSONDecodeError, KbError, KeyError, TypeError, ValueError) as exc:
            rejects.append(RejectRecord(line_number=number, reason=str(exc)))
    return EventCollection(events=events, rejects=rejects)


def filter_by_period(collection: EventCollection, start: date, end: date) -> EventCollection:
    """Keep events dated inside ``[start, end]``.

    One-off events qualify through their point_in_time; duration events must
    have both started and ended inside the period. Events with no usable
    date (including open-ended ones with only a start_time) are dropped.
    Idempotent.
    """
    if start > end:
        raise ValueError(f"period start {start} after end {end}")
    kept = []
    for event in collection:
        if event.point_in_time is not None and start <= event.point_in_time <= end:
            kept.append(event)
        elif (
            event.start_time is not None
            and event.end_time is not None
            and start <= event.start_time
            and event.end_time <= end
        ):
            kept.append(event)
    return EventCollection(events=kept, rejects=list(collection.rejects))


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """The packaged English stopword list (normalized forms)."""
    text = resources.files("newsevents.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip().casefold()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


def event_keywords(event: KbEvent, stop: frozenset[str] | None = None) -> frozenset[str]:
    """Subject keywords of an event: its label plus all its type labels.

    Tokens come from the corpus tokenizer's normalized forms; stopwords and
    empty tokens are removed.
    """
    stop = stopwords() if stop is None else stop
    words = set()
    for text in (event.label, *(label for _, label in event.wets)):
        for token in tokenize(text):
            if token.norm and token.norm not in stop:
                words.add(token.norm)
    return frozenset(words)
