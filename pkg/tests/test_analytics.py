import random

from menuadapt.analytics import Analyzer, compute_metrics
from menuadapt.eventlog import ClickEvent, EventDatabase, VisitEvent

from conftest import golden_db


def naive_recount(db, model):
    """Independent single-pass oracle: per-item clicks and per-page visits."""
    item_keys = {i.key for i in model.items()}
    clicks = {}
    visits = {}
    for e in db.events:
        if isinstance(e, ClickEvent):
            if e.item in item_keys:
                clicks.setdefault(e.item, []).append(e.t)
        else:
            visits.setdefault(e.page, []).append((e.enter, e.leave))
    return clicks, visits


def label_map(model):
    return {i.label: i for i in model.items()}


def test_golden_history_metrics(wiki_model, wiki_db):
    snap = compute_metrics(wiki_db, wiki_model)
    by = label_map(wiki_model)
    counts = {label: snap.item(item.key).click_count for label, item in by.items()}
    assert counts == {
        "Main page": 2,
        "Contents": 0,
        "Featured contents": 6,
        "Current events": 0,
        "Random article": 10,
        "Donate to Wikipedia": 0,
        "Wikipedia store": 0,
    }
    assert snap.page("/wiki/Main_Page").total_duration_ms == 74_000
    assert snap.page("/wiki/Featured_contents").total_duration_ms == 29_000
    assert snap.page("/wiki/Featured_contents").visit_count == 2


def test_empty_db_all_zero(wiki_model):
    snap = compute_metrics(EventDatabase(), wiki_model)
    assert snap.at_revision == 0
    assert len(snap.items) == 7
    assert all(m.click_count == 0 and m.last_click_ms is None for m in snap.items.values())


def test_snapshot_covers_every_model_item(wiki_model, wiki_db):
    snap = compute_metrics(wiki_db, wiki_model)
    assert set(snap.items) == {i.key for i in wiki_model.items()}


def test_unknown_item_clicks_ignored_in_item_metrics(wiki_model):
    db = EventDatabase()
    db.log_click("zz#stale:9", "/wiki/Main_Page", 10)
    db.log_visit("/somewhere/else", 0, 5_000)
    snap = compute_metrics(db, wiki_model)
    assert all(m.click_count == 0 for m in snap.items.values())
    assert snap.page("/somewhere/else").total_duration_ms == 5_000  # retained


def test_cache_hit_returns_same_object(wiki_model, wiki_db):
    first = compute_metrics(wiki_db, wiki_model)
    second = compute_metrics(wiki_db, wiki_model, cache=first)
    assert second is first


def test_analyzer_counts_single_recomputation(wiki_model, wiki_db):
    analyzer = Analyzer()
    snapshots = [analyzer.metrics(wiki_db, wiki_model) for _ in range(5)]
    assert analyzer.recomputations == 1
    assert all(s is snapshots[0] for s in snapshots)


def test_analyzer_recomputes_per_append(wiki_model, wiki_db):
    analyzer = Analyzer()
    key = wiki_model.items()[0].key
    for k in range(4):
        wiki_db.log_click(key, "/wiki/Main_Page", 1_000_000 + k)
        snap = analyzer.metrics(wiki_db, wiki_model)
        assert snap.at_revision == wiki_db.revision
    assert analyzer.recomputations == 4


def test_analyzer_invalidation_after_db_swap(wiki_model, wiki_db):
    analyzer = Analyzer()
    analyzer.metrics(wiki_db, wiki_model)
    fresh = EventDatabase()
    key = wiki_model.items()[0].key
    for k in range(wiki_db.revision):  # drive the fresh db to the same revision
        fresh.log_click(key, "/p", k)
    analyzer.invalidate()
    snap = analyzer.metrics(fresh, wiki_model)
    assert snap.item(key).click_count == fresh.revision


def test_oracle_equivalence_random_logs(wiki_model):
    rng = random.Random(7)
    keys = [i.key for i in wiki_model.items()]
    pages = sorted({i.page_target for i in wiki_model.items() if i.page_target})
    for _ in range(40):
        db = EventDatabase()
        for _ in range(rng.randrange(0, 500)):
            t = rng.randrange(0, 10_000_000)
            if rng.random() < 0.5:
                db.log_click(rng.choice(keys), rng.choice(pages), t)
            else:
                db.log_visit(rng.choice(pages), t, t + rng.randrange(0, 100_000))
        snap = compute_metrics(db, wiki_model)
        clicks, visits = naive_recount(db, wiki_model)
        for key in keys:
            expected = sorted(clicks.get(key, []))
            got = snap.item(key)
            assert got.click_count == len(expected)
            assert list(got.click_timestamps) == expected
            assert got.last_click_ms == (expected[-1] if expected else None)
        for page, intervals in visits.items():
            got = snap.page(page)
            assert got.visit_count == len(intervals)
            assert got.total_duration_ms == sum(b - a for a, b in intervals)
            enters = sorted(a for a, _ in intervals)
            assert got.first_visit_ms == enters[0]
            assert got.last_visit_ms == enters[-1]


def test_click_conservation(wiki_model):
    rng = random.Random(9)
    keys = [i.key for i in wiki_model.items()]
    db = EventDatabase()
    known = 0
    for k in range(300):
        if rng.random() < 0.8:
            db.log_click(rng.choice(keys), "/p", k)
            known += 1
        else:
            db.log_click(f"stale#x:{k}", "/p", k)
    snap = compute_metrics(db, wiki_model)
    assert sum(m.click_count for m in snap.items.values()) == known
