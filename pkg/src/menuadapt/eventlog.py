"""Append-only interaction event database with text serialization.

Two wire shapes share the same event objects:
  * persistent store, a single JSON document:
    ``{"version":1,"revision":<int>,"events":[...]}``
  * replay log, JSON Lines (one event object per line).

Clicks are keyed by the item's canonical element-id string, visits by the
normalized page path. Events are never filtered or rewritten; mis-clicks
stay in the log and get statistically outweighed as legitimate events
accumulate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CorruptStore, InvalidInterval

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClickEvent:
    item: str  # canonical ElementId string
    page: str  # normalized page path the click happened on
    t: int  # epoch milliseconds

    def to_obj(self) -> dict:
        return {"type": "click", "item": self.item, "page": self.page, "t": self.t}


@dataclass(frozen=True)
class VisitEvent:
    page: str
    enter: int
    leave: int

    @property
    def duration_ms(self) -> int:
        return self.leave - self.enter

    def to_obj(self) -> dict:
        return {"type": "visit", "page": self.page, "enter": self.enter, "leave": self.leave}


InteractionEvent = ClickEvent | VisitEvent


class EventDatabase:
    """Ordered, append-only event list with a monotone revision counter.

    The revision increases by exactly 1 per appended event, which makes it
    a sound cache key for derived metrics (see analytics).
    """

    __slots__ = ("version", "revision", "events")

    def __init__(self, events: list[InteractionEvent] | None = None, revision: int | None = None):
        self.version = FORMAT_VERSION
        self.events: list[InteractionEvent] = list(events) if events else []
        self.revision = len(self.events) if revision is None else revision

    def log_click(self, item: str, page: str, t: int) -> "EventDatabase":
        if t < 0:
            raise ValueError(f"click timestamp must be >= 0, got {t}")
        self.events.append(ClickEvent(item=item, page=page, t=t))
        self.revision += 1
        return self

    def log_visit(self, page: str, enter_ms: int, leave_ms: int) -> "EventDatabase":
        if enter_ms < 0:
            raise ValueError(f"visit enter must be >= 0, got {enter_ms}")
        if leave_ms < enter_ms:
            raise InvalidInterval(f"visit leaves ({leave_ms}) before it enters ({enter_ms})")
        self.events.append(VisitEvent(page=page, enter=enter_ms, leave=leave_ms))
        self.revision += 1
        return self

    def append_event(self, event: InteractionEvent) -> "EventDatabase":
        if isinstance(event, ClickEvent):
            return self.log_click(event.item, event.page, event.t)
        return self.log_visit(event.page, event.enter, event.leave)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventDatabase):
            return NotImplemented
        return (
            self.version == other.version
            and self.revision == other.revision
            and self.events == other.events
        )

    def __len__(self) -> int:
        return len(self.events)


def _event_from_obj(obj: object) -> InteractionEvent:
    if not isinstance(obj, dict):
        raise CorruptStore(f"event is not an object: {obj!r}")
    kind = obj.get("type")
    try:
        if kind == "click":
            item, page, t = obj["item"], obj["page"], obj["t"]
            if not (isinstance(item, str) and isinstance(page, str) and isinstance(t, int)):
                raise CorruptStore(f"malformed click event: {obj!r}")
            return ClickEvent(item=item, page=page, t=t)
        if kind == "visit":
            page, enter, leave = obj["page"], obj["enter"], obj["leave"]
            if not (isinstance(page, str) and isinstance(enter, int) and isinstance(leave, int)):
                raise CorruptStore(f"malformed visit event: {obj!r}")
            if leave < enter:
                raise CorruptStore(f"visit interval inverted: {obj!r}")
            return VisitEvent(page=page, enter=enter, leave=leave)
    except KeyError as exc:
        raise CorruptStore(f"event missing field {exc}: {obj!r}") from None
    raise CorruptStore(f"unknown event type: {obj!r}")


def serialize(db: EventDatabase) -> str:
    """Single compact UTF-8 JSON document; key order is part of the format."""
    return json.dumps(
        {"version": db.version, "revision": db.revision, "events": [e.to_obj() for e in db.events]},
        separators=(",", ":"),
        ensure_ascii=False,
    )


def deserialize(text: str) -> EventDatabase:
    """Inverse of serialize. Raises CorruptStore on anything it did not write.

    Callers are expected to catch CorruptStore, report the loss, and start
    from a fresh empty database.
    """
    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise CorruptStore(f"store is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise CorruptStore("store root is not an object")
    version = obj.get("version")
    if not isinstance(version, int) or not 1 <= version <= FORMAT_VERSION:
        raise CorruptStore(f"unsupported store version: {version!r}")
    revision = obj.get("revision")
    events_raw = obj.get("events")
    if not isinstance(revision, int) or revision < 0 or not isinstance(events_raw, list):
        raise CorruptStore("store envelope malformed")
    events = [_event_from_obj(o) for o in events_raw]
    if revision != len(events):
        raise CorruptStore(f"revision {revision} disagrees with event count {len(events)}")
    return EventDatabase(events=events, revision=revision)


def events_to_jsonl(events: list[InteractionEvent]) -> str:
    return "".join(
        json.dumps(e.to_obj(), separators=(",", ":"), ensure_ascii=False) + "\n" for e in events
    )


def events_from_jsonl(text: str) -> list[InteractionEvent]:
    events = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptStore(f"replay log line {line_no} is not valid JSON: {exc}") from None
        events.append(_event_from_obj(obj))
    return events


def load_events_text(text: str) -> list[InteractionEvent]:
    """Accept either wire shape: a store envelope or a JSON Lines replay log.

    The shapes are disjoint (an envelope is not a valid event object and
    vice versa), so try the envelope first and fall back to JSON Lines.
    """
    try:
        return list(deserialize(text).events)
    except CorruptStore:
        return events_from_jsonl(text)
