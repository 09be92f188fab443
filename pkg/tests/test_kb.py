"""Event loading, temporal filtering, keyword extraction."""

from datetime import date

import pytest

from newsevents.kb import (
    EventCollection,
    KbError,
    event_keywords,
    filter_by_period,
    load_events,
    parse_event,
    stopwords,
)


def event_record(qid="Q1", **overrides):
    record = {
        "qid": qid,
        "label": "test event",
        "instance_of": [{"qid": "Q100", "label": "earthquake"}],
        "point_in_time": "2015-03-24",
        "country": [],
        "location": [],
        "claims": [],
    }
    record.update(overrides)
    return record


class TestLoadEvents:
    def test_valid_lines(self):
        lines = [str(event_record(qid=f"Q{i}")).replace("'", '"') for i in (1, 2, 3)]
        collection = load_events(lines)
        assert len(collection) == 3
        assert not collection.rejects

    def test_malformed_line_rejected_and_load_continues(self):
        import json

        lines = [json.dumps(event_record(qid="Q1")), '{"qid": "Q2", "label": "broken"']
        collection = load_events(lines)
        assert len(collection) == 1
        assert len(collection.rejects) == 1
        assert collection.rejects[0].line_number == 2

    def test_fixture_quantity_claim(self, fixture_events):
        event = fixture_events.get("Q19671417")
        claims = {c.pid: c for c in event.claims}
        assert claims["P1120"].kind == "quantity"
        assert claims["P1120"].value == 150

    def test_item_claims_carry_qid_and_label(self, fixture_events):
        event = fixture_events.get("Q19671417")
        country = next(c for c in event.claims if c.pid == "P17")
        assert country.value == "France"
        assert country.value_qid == "Q142"

    def test_invalid_qid_rejected(self):
        with pytest.raises(KbError):
            parse_event(event_record(qid="X123"))

    def test_event_without_types_rejected(self):
        with pytest.raises(KbError):
            parse_event(event_record(instance_of=[]))


class TestFilterByPeriod:
    PERIOD = (date(2004, 1, 1), date(2017, 12, 31))

    def one(self, **overrides) -> EventCollection:
        return EventCollection(events=[parse_event(event_record(**overrides))])

    def test_point_in_time_inside_kept(self):
        kept = filter_by_period(self.one(point_in_time="2015-03-24"), *self.PERIOD)
        assert len(kept) == 1

    def test_duration_started_before_dropped(self):
        collection = self.one(
            point_in_time=None, start_time="2003-12-01", end_time="2004-02-01"
        )
        assert len(filter_by_period(collection, *self.PERIOD)) == 0

    def test_duration_inside_kept(self):
        collection = self.one(
            point_in_time=None, start_time="2004-01-02", end_time="2004-02-01"
        )
        assert len(filter_by_period(collection, *self.PERIOD)) == 1

    def test_open_ended_dropped(self):
        collection = self.one(point_in_time=None, start_time="2014-01-01")
        assert len(filter_by_period(collection, *self.PERIOD)) == 0

    def test_idempotent(self, fixture_events):
        once = filter_by_period(fixture_events, *self.PERIOD)
        twice = filter_by_period(once, *self.PERIOD)
        assert [e.qid for e in once] == [e.qid for e in twice]

    def test_retained_events_have_usable_dates(self, fixture_events):
        kept = filter_by_period(fixture_events, *self.PERIOD)
        assert all(e.has_usable_date() for e in kept)

    def test_bad_period(self, fixture_events):
        with pytest.raises(ValueError):
            filter_by_period(fixture_events, date(2017, 1, 1), date(2004, 1, 1))


class TestEventKeywords:
    def test_label_and_type_tokens(self):
        event = parse_event(
            event_record(
                label="Germanwings Flight 9525",
                instance_of=[{"qid": "Q744913", "label": "aviation accident"}],
            )
        )
        assert event_keywords(event) == {
            "germanwings",
            "flight",
            "9525",
            "aviation",
            "accident",
        }

    def test_type_only(self):
        event = parse_event(
            event_record(label="", instance_of=[{"qid": "Q1", "label": "election"}])
        )
        assert event_keywords(event) == {"election"}

    def test_stopwords_removed(self):
        event = parse_event(
            event_record(
                label="", instance_of=[{"qid": "Q1", "label": "Elections in Saudi Arabia"}]
            )
        )
        assert event_keywords(event) == {"elections", "saudi", "arabia"}

    def test_never_contains_stopwords_or_empties(self, fixture_events):
        stop = stopwords()
        for event in fixture_events:
            keywords = event_keywords(event)
            assert all(k and k not in stop for k in keywords)
