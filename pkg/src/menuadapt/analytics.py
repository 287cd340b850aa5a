"""Usage metrics aggregated from the event database.

Metrics are recomputed only when the database revision moved since the
last computation; otherwise the cached snapshot is returned untouched.
The revision is a sound cache key because appends are the only mutation
(clearing history swaps in a new database and invalidates the cache).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .eventlog import ClickEvent, EventDatabase, VisitEvent
from .model import MenuModel


@dataclass(frozen=True)
class ItemMetrics:
    click_count: int = 0
    click_timestamps: tuple[int, ...] = ()
    last_click_ms: int | None = None


@dataclass(frozen=True)
class PageMetrics:
    visit_count: int = 0
    total_duration_ms: int = 0
    visit_enter_timestamps: tuple[int, ...] = ()
    first_visit_ms: int | None = None
    last_visit_ms: int | None = None


@dataclass(frozen=True)
class MetricsSnapshot:
    at_revision: int
    items: dict[str, ItemMetrics] = field(default_factory=dict)
    pages: dict[str, PageMetrics] = field(default_factory=dict)

    def item(self, key: str) -> ItemMetrics:
        return self.items.get(key, _ZERO_ITEM)

    def page(self, key: str | None) -> PageMetrics:
        if key is None:
            return _ZERO_PAGE
        return self.pages.get(key, _ZERO_PAGE)


_ZERO_ITEM = ItemMetrics()
_ZERO_PAGE = PageMetrics()


def compute_metrics(
    db: EventDatabase, model: MenuModel, cache: MetricsSnapshot | None = None
) -> MetricsSnapshot:
    """Aggregate the event log into per-item and per-page metrics.

    Returns `cache` itself when its revision matches the database (no work
    done). The snapshot has an entry for every item in the model, zeros
    included. Clicks on items absent from the model stay in the raw log
    but are excluded here; menus change across sessions and stale ids must
    not disturb scoring.
    """
    if cache is not None and cache.at_revision == db.revision:
        return cache

    model_keys = model.item_keys()
    clicks: dict[str, list[int]] = {key: [] for key in model_keys}
    visits: dict[str, list[VisitEvent]] = {}
    for event in db.events:
        if isinstance(event, ClickEvent):
            if event.item in clicks:
                clicks[event.item].append(event.t)
        else:
            visits.setdefault(event.page, []).append(event)

    items: dict[str, ItemMetrics] = {}
    for item in model.items():
        ts = sorted(clicks[item.key])
        items[item.key] = ItemMetrics(
            click_count=len(ts),
            click_timestamps=tuple(ts),
            last_click_ms=ts[-1] if ts else None,
        )
        if item.page_target is not None:
            visits.setdefault(item.page_target, [])

    pages: dict[str, PageMetrics] = {}
    for page, page_visits in visits.items():
        enters = sorted(v.enter for v in page_visits)
        pages[page] = PageMetrics(
            visit_count=len(page_visits),
            total_duration_ms=sum(v.duration_ms for v in page_visits),
            visit_enter_timestamps=tuple(enters),
            first_visit_ms=enters[0] if enters else None,
            last_visit_ms=enters[-1] if enters else None,
        )

    return MetricsSnapshot(at_revision=db.revision, items=items, pages=pages)


class Analyzer:
    """Caching wrapper around compute_metrics with an instrumented counter."""

    def __init__(self) -> None:
        self._cache: MetricsSnapshot | None = None
        self.recomputations = 0

    def metrics(self, db: EventDatabase, model: MenuModel) -> MetricsSnapshot:
        snapshot = compute_metrics(db, model, self._cache)
        if snapshot is not self._cache:
            self.recomputations += 1
            self._cache = snapshot
        return snapshot

    def invalidate(self) -> None:
        """Drop the cache; required when the database itself is replaced."""
        self._cache = None
