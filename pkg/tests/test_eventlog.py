import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from menuadapt.errors import CorruptStore, InvalidInterval
from menuadapt.eventlog import (
    ClickEvent,
    EventDatabase,
    VisitEvent,
    deserialize,
    events_from_jsonl,
    events_to_jsonl,
    load_events_text,
    serialize,
)

# Realistic key/path alphabets: element ids and URL paths as the model
# produces them.
item_keys = st.from_regex(r"[a-z]{1,6}#[a-z0-9-]{1,8}:[0-9]{1,2}(>[a-z]{1,6}:[0-9]{1,2}){0,3}", fullmatch=True)
pages = st.from_regex(r"(/[a-zA-Z0-9_-]{1,12}){1,4}", fullmatch=True)
times = st.integers(min_value=0, max_value=2_000_000_000_000)

clicks = st.builds(ClickEvent, item=item_keys, page=pages, t=times)
visits = st.builds(
    lambda page, enter, d: VisitEvent(page=page, enter=enter, leave=enter + d),
    page=pages,
    enter=times,
    d=st.integers(min_value=0, max_value=10_000_000),
)
events = st.lists(clicks | visits, max_size=60)


def build_db(evts) -> EventDatabase:
    db = EventDatabase()
    for e in evts:
        db.append_event(e)
    return db


def test_empty_db_serializes_exactly():
    assert serialize(EventDatabase()) == '{"version":1,"revision":0,"events":[]}'


def test_click_appends_and_increments():
    db = EventDatabase()
    db.log_click("ul#nav:0>li:2", "/page", 123)
    assert db.revision == 1
    assert db.events == [ClickEvent(item="ul#nav:0>li:2", page="/page", t=123)]


def test_visit_duration_and_zero_length():
    db = EventDatabase()
    db.log_visit("/wiki/Main_Page", 1_000, 75_000)
    assert db.events[-1].duration_ms == 74_000
    db.log_visit("/wiki/Main_Page", 80_000, 80_000)
    assert db.events[-1].duration_ms == 0


def test_invalid_interval_rejected():
    with pytest.raises(InvalidInterval):
        EventDatabase().log_visit("/p", 100, 99)


def test_negative_click_time_rejected():
    with pytest.raises(ValueError):
        EventDatabase().log_click("k", "/p", -1)


def test_one_click_one_visit_roundtrip():
    db = build_db(
        [ClickEvent("a:0", "/p", 5), VisitEvent("/p", 10, 20)]
    )
    assert deserialize(serialize(db)) == db


def test_wire_format_shape():
    db = build_db([ClickEvent("a:0", "/p", 5), VisitEvent("/q", 10, 20)])
    obj = json.loads(serialize(db))
    assert obj == {
        "version": 1,
        "revision": 2,
        "events": [
            {"type": "click", "item": "a:0", "page": "/p", "t": 5},
            {"type": "visit", "page": "/q", "enter": 10, "leave": 20},
        ],
    }
    # key order is part of the format
    assert serialize(db).startswith('{"version":1,"revision":2,"events":[{"type":"click"')


@given(events)
def test_roundtrip_property(evts):
    db = build_db(evts)
    assert deserialize(serialize(db)) == db


@given(events)
def test_revision_equals_append_count(evts):
    db = build_db(evts)
    assert db.revision == len(evts)


@given(st.lists(clicks | visits, min_size=1, max_size=200))
@settings(max_examples=50)
def test_mean_event_size_bound(evts):
    db = build_db(evts)
    payload = len(serialize(db).encode("utf-8"))
    assert payload / len(evts) <= 250


@pytest.mark.parametrize(
    "text",
    [
        "",
        "not json",
        "[]",
        '{"version":"x","revision":0,"events":[]}',
        '{"version":99,"revision":0,"events":[]}',
        '{"version":1,"revision":-1,"events":[]}',
        '{"version":1,"revision":0}',
        '{"version":1,"revision":1,"events":[]}',
        '{"version":1,"revision":1,"events":[{"type":"bogus"}]}',
        '{"version":1,"revision":1,"events":[{"type":"click","item":"a"}]}',
        '{"version":1,"revision":1,"events":[{"type":"visit","page":"/p","enter":5,"leave":1}]}',
    ],
)
def test_corrupt_store_rejected(text):
    with pytest.raises(CorruptStore):
        deserialize(text)


def test_jsonl_roundtrip():
    evts = [ClickEvent("a:0", "/p", 5), VisitEvent("/q", 10, 20), ClickEvent("b:1", "/p", 30)]
    assert events_from_jsonl(events_to_jsonl(evts)) == evts


def test_jsonl_blank_lines_skipped():
    text = '\n{"type":"click","item":"a:0","page":"/p","t":5}\n\n'
    assert events_from_jsonl(text) == [ClickEvent("a:0", "/p", 5)]


def test_jsonl_corrupt_line():
    with pytest.raises(CorruptStore):
        events_from_jsonl('{"type":"click","item":"a:0","page":"/p","t":5}\n{oops\n')


def test_load_events_text_accepts_both_shapes():
    db = build_db([ClickEvent("a:0", "/p", 5), VisitEvent("/q", 10, 20)])
    assert load_events_text(serialize(db)) == db.events
    assert load_events_text(events_to_jsonl(db.events)) == db.events


def test_append_only_no_mutation_of_existing():
    db = build_db([ClickEvent("a:0", "/p", 5)])
    snapshot = list(db.events)
    db.log_visit("/q", 10, 20)
    db.log_click("b:1", "/p", 30)
    assert db.events[: len(snapshot)] == snapshot
