from __future__ import annotations

from pathlib import Path

import pytest

from menuadapt.dom import DocumentTree, parse_document
from menuadapt.eventlog import EventDatabase
from menuadapt.model import MenuModel, extract_menus
from menuadapt.selectors import SelectorSet

FIXTURES = Path(__file__).parent / "fixtures"

WIKI_SELECTORS = SelectorSet(menu=".menu", item=".item")
GROUPED_SELECTORS = SelectorSet(menu=".menu", group=".group", item=".item")

# Fig-2a-style golden history: clicks per label and visit durations (ms)
# per target page. "Random article" is linkless, so its page time is
# untracked by construction.
GOLDEN_CLICKS = {"Main page": 2, "Featured contents": 6, "Random article": 10}
GOLDEN_VISITS = [
    ("/wiki/Main_Page", 74_000),
    ("/wiki/Featured_contents", 20_000),
    ("/wiki/Featured_contents", 9_000),
]


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def parse_fixture(name: str) -> DocumentTree:
    return parse_document(fixture_text(name))


@pytest.fixture
def wiki_doc() -> DocumentTree:
    return parse_fixture("wiki_sidebar.html")


@pytest.fixture
def wiki_model(wiki_doc) -> MenuModel:
    return extract_menus(wiki_doc, WIKI_SELECTORS)


def golden_db(model: MenuModel, start_ms: int = 1_000_000) -> EventDatabase:
    """Interaction history matching the golden scenario table."""
    by_label = {item.label: item for item in model.items()}
    db = EventDatabase()
    t = start_ms
    for label, count in GOLDEN_CLICKS.items():
        for _ in range(count):
            t += 1_000
            db.log_click(by_label[label].key, "/wiki/Main_Page", t)
    for page, duration in GOLDEN_VISITS:
        t += 10_000
        db.log_visit(page, t, t + duration)
    return db


@pytest.fixture
def wiki_db(wiki_model) -> EventDatabase:
    return golden_db(wiki_model)


def random_db(rng, model: MenuModel, max_events: int = 300) -> EventDatabase:
    """Random mixed log over the model, with a sprinkle of stale ids and
    unknown pages to keep scoring honest about foreign history."""
    db = EventDatabase()
    item_keys = [i.key for i in model.items()]
    pages = sorted({i.page_target for i in model.items() if i.page_target})
    for _ in range(rng.randrange(0, max_events)):
        t = rng.randrange(0, 50_000_000)
        roll = rng.random()
        if roll < 0.45:
            db.log_click(rng.choice(item_keys), rng.choice(pages), t)
        elif roll < 0.5:
            db.log_click(f"stale#gone:{rng.randrange(5)}", rng.choice(pages), t)
        elif roll < 0.95:
            db.log_visit(rng.choice(pages), t, t + rng.randrange(0, 600_000))
        else:
            db.log_visit("/not-in-menu", t, t + rng.randrange(0, 600_000))
    return db
