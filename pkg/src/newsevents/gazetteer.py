"""Gazetteer named-entity recognizer and label genericization.

A deterministic replacement for a statistical NER: curated phrase lists per
category (shipped as data files) plus a date regex. Good enough for short
event-type labels and for the article infobox; category names follow the
usual NER tag set so the generic replacement phrases stay conventional.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .corpus import TokenStream, tokenize

# Category -> generic replacement phrase used in label genericization.
GENERIC_PHRASES: dict[str, str] = {
    "GPE": "geopolitical entity",
    "ORG": "organization",
    "PERSON": "person",
    "NORP": "nationality",
    "DATE": "date",
}

GENERIC_TOKENS = frozenset(
    token for phrase in GENERIC_PHRASES.values() for token in phrase.split()
)

_MONTHS = (
    "january|february|march|april|may|june|july|august|september|october"
    "|november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec"
)
# Date shapes: "jan-7", "7-jan", ISO dates, bare years. Bare month names
# stay untouched ("may" is usually not a date in a type label).
_DATE_RE = re.compile(
    rf"^(?:(?:{_MONTHS})-\d{{1,2}}|\d{{1,2}}-(?:{_MONTHS})"
    rf"|\d{{4}}-\d{{2}}-\d{{2}}|1[89]\d{{2}}|20\d{{2}})$"
)

_GAZETTEER_FILES = {
    "GPE": ("countries.txt", "cities.txt"),
    "ORG": ("organizations.txt",),
    "PERSON": ("persons.txt",),
    "NORP": ("nationalities.txt",),
}


@dataclass(frozen=True)
class EntityMention:
    surface: str
    category: str
    start: int  # char span into the source text
    end: int


class EntityRecognizer:
    """Longest-match phrase recognizer over normalized tokens."""

    def __init__(self, phrases: Mapping[str, Iterable[str]]):
        # category -> tuple of normalized phrase token tuples
        self._phrases: dict[tuple[str, ...], str] = {}
        self._max_len = 1
        for category, entries in phrases.items():
            for entry in entries:
                key = tuple(tokenize(entry).norms())
                if key:
                    self._phrases.setdefault(key, category)
                    self._max_len = max(self._max_len, len(key))

    def _match_at(self, norms: Sequence[str], i: int) -> tuple[int, str] | None:
        """Longest phrase starting at token i; returns (length, category)."""
        limit = min(self._max_len, len(norms) - i)
        for length in range(limit, 0, -1):
            category = self._phrases.get(tuple(norms[i : i + length]))
            if category is not None:
                return length, category
        if _DATE_RE.match(norms[i]):
            return 1, "DATE"
        return None

    def recognize(self, stream: TokenStream) -> list[EntityMention]:
        """Non-overlapping mentions, left to right, longest match first."""
        tokens = stream.tokens
        norms = [t.norm for t in tokens]
        mentions = []
        i = 0
        while i < len(tokens):
            hit = self._match_at(norms, i)
            if hit is None:
                i += 1
                continue
            length, category = hit
            first, last = tokens[i], tokens[i + length - 1]
            mentions.append(
                EntityMention(
                    surface=" ".join(t.surface for t in tokens[i : i + length]),
                    category=category,
                    start=first.start,
                    end=last.end,
                )
            )
            i += length
        return mentions


def load_default_recognizer() -> EntityRecognizer:
    """Recognizer over the packaged gazetteer files."""
    phrases: dict[str, list[str]] = {}
    package = resources.files("newsevents.data.gazetteer")
    for category, filenames in _GAZETTEER_FILES.items():
        entries = phrases.setdefault(category, [])
        for filename in filenames:
            for line in package.joinpath(filename).read_text("utf-8").splitlines():
                line = line.strip()
                if line and not line.startswith("#"):
                    entries.append(line)
    return EntityRecognizer(phrases)


def genericize_label(label: str, recognizer: EntityRecognizer) -> list[str]:
    """Normalized label tokens with entity mentions replaced generically.

    "earthquake in New Zealand" becomes ["earthquake", "in", "geopolitical",
    "entity"]; the replacement phrase contributes one token per word so the
    result stays a flat token list.
    """
    stream = tokenize(label)
    norms = stream.norms()
    out: list[str] = []
    i = 0
    while i < len(norms):
        hit = recognizer._match_at(norms, i)
        if hit is None:
            out.append(norms[i])
            i += 1
        else:
            length, category = hit
            out.extend(GENERIC_PHRASES[category].split())
            i += length
    return out
