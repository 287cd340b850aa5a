"""Synthetic menus and interaction logs for benchmarks and stress tests."""

from __future__ import annotations

import random

from .eventlog import ClickEvent, InteractionEvent, VisitEvent
from .model import MenuModel


def menu_html(groups: int, items_per_group: int) -> str:
    """A grouped menu page: `groups` sections of `items_per_group` links."""
    parts = [
        "<!DOCTYPE html>",
        "<html><head><title>Synthetic menu</title></head><body>",
        '<nav class="menu" id="bench-menu">',
    ]
    for g in range(groups):
        parts.append(f'<section class="group" id="group-{g}"><ul>')
        for i in range(items_per_group):
            parts.append(
                f'<li class="item"><a href="/page/{g}/{i}">Entry {g}-{i}</a></li>'
            )
        parts.append("</ul></section>")
    parts.append("</nav></body></html>")
    return "".join(parts)


def random_events(
    model: MenuModel,
    count: int,
    rng: random.Random,
    start_ms: int = 1_600_000_000_000,
    step_ms: int = 60_000,
) -> list[InteractionEvent]:
    """Mixed click/visit stream over the model's items, timestamps increasing."""
    items = model.items()
    pages = sorted({i.page_target for i in items if i.page_target is not None})
    events: list[InteractionEvent] = []
    t = start_ms
    for _ in range(count):
        t += rng.randrange(1, step_ms)
        if pages and rng.random() < 0.5:
            page = rng.choice(pages)
            duration = rng.randrange(0, 120_000)
            events.append(VisitEvent(page=page, enter=t, leave=t + duration))
        else:
            item = rng.choice(items)
            events.append(ClickEvent(item=item.key, page=item.page_target or "/", t=t))
    return events
