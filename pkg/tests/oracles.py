"""Brute-force scoring oracles, independent of the package's policy code.

Each oracle recounts raw quantities straight from the event list and
applies the documented scoring rule directly. They intentionally share no
code with menuadapt.policies; tests compare full rankings and scores
against them.
"""

from __future__ import annotations

from menuadapt.eventlog import ClickEvent, VisitEvent

HOUR_MS = 3_600_000


def _single_menu_items(model):
    assert len(model.menus) == 1, "oracles are defined over single-menu models"
    return model.menus[0].items()


def _rank(model, raws: dict[str, float]):
    """Sort best-first with document-order tie-break; normalize to sum 1."""
    items = _single_menu_items(model)
    doc_index = {item.key: n for n, item in enumerate(items)}
    order = sorted(items, key=lambda i: (-raws.get(i.key, 0.0), doc_index[i.key]))
    total = sum(raws.get(i.key, 0.0) for i in items)
    scores = {
        i.key: (raws.get(i.key, 0.0) / total if total > 0 else 0.0) for i in items
    }
    return [i.key for i in order], scores


def click_counts(events, model):
    keys = {i.key for i in _single_menu_items(model)}
    counts: dict[str, float] = {}
    for e in events:
        if isinstance(e, ClickEvent) and e.item in keys:
            counts[e.item] = counts.get(e.item, 0) + 1
    return counts


def oracle_click_frequency(events, model):
    return _rank(model, click_counts(events, model))


def _page_quantity(events, model, fold):
    per_page: dict[str, float] = {}
    for e in events:
        if isinstance(e, VisitEvent):
            per_page[e.page] = fold(per_page.get(e.page), e)
    raws = {}
    for item in _single_menu_items(model):
        if item.page_target is not None and item.page_target in per_page:
            raws[item.key] = per_page[item.page_target]
    return raws


def oracle_visit_duration(events, model):
    return _rank(
        model, _page_quantity(events, model, lambda acc, e: (acc or 0) + (e.leave - e.enter))
    )


def oracle_visit_frequency(events, model):
    return _rank(model, _page_quantity(events, model, lambda acc, e: (acc or 0) + 1))


def _reciprocal_rank_scores(model, key_ms: dict[str, int], newest_first: bool):
    items = _single_menu_items(model)
    doc_index = {item.key: n for n, item in enumerate(items)}
    present = [i.key for i in items if i.key in key_ms]
    present.sort(key=lambda k: ((-key_ms[k] if newest_first else key_ms[k]), doc_index[k]))
    return {k: 1.0 / (n + 1) for n, k in enumerate(present)}


def _last_enter(events, model):
    return {
        k: int(v)
        for k, v in _page_quantity(
            events, model, lambda acc, e: e.enter if acc is None else max(acc, e.enter)
        ).items()
    }


def _first_enter(events, model):
    return {
        k: int(v)
        for k, v in _page_quantity(
            events, model, lambda acc, e: e.enter if acc is None else min(acc, e.enter)
        ).items()
    }


def oracle_visit_recency(events, model):
    return _rank(model, _reciprocal_rank_scores(model, _last_enter(events, model), True))


def oracle_serial_position(events, model, weights):
    w_freq, w_rec, w_prim = weights
    items = _single_menu_items(model)

    def normalized(raws):
        total = sum(raws.values())
        return {k: v / total for k, v in raws.items()} if total > 0 else {}

    freq = normalized(_page_quantity(events, model, lambda acc, e: (acc or 0) + 1))
    rec = normalized(_reciprocal_rank_scores(model, _last_enter(events, model), True))
    prim = normalized(_reciprocal_rank_scores(model, _first_enter(events, model), False))
    raws = {
        i.key: w_freq * freq.get(i.key, 0.0)
        + w_rec * rec.get(i.key, 0.0)
        + w_prim * prim.get(i.key, 0.0)
        for i in items
    }
    return _rank(model, raws)


def oracle_access_rank_weights(events, model, alpha, half_life_ms, clamp, now_ms):
    """Direct evaluation of w = m^alpha * crf^(1/alpha) * h per item."""
    items = _single_menu_items(model)
    keys = {i.key for i in items}
    doc_index = {item.key: n for n, item in enumerate(items)}
    sequence = sorted(
        ((e.t, doc_index[e.item], e.item) for e in events
         if isinstance(e, ClickEvent) and e.item in keys)
    )
    accesses = [key for _, _, key in sequence]

    m_raw = {i.key: 1.0 for i in items}
    if accesses:
        prev = accesses[-1]
        for a, b in zip(accesses, accesses[1:]):
            if a == prev:
                m_raw[b] = m_raw.get(b, 1.0) + 1.0
    m_total = sum(m_raw.values())

    weights = {}
    current_bucket = (now_ms // HOUR_MS) % 24
    for item in items:
        ts = [t for (t, _, k) in sequence if k == item.key]
        crf = sum(2.0 ** (-(now_ms - t) / half_life_ms) for t in ts)
        if ts:
            in_bucket = sum(1 for t in ts if (t // HOUR_MS) % 24 == current_bucket)
            ratio = in_bucket / (len(ts) / 24.0)
            h = min(max(ratio, clamp[0]), clamp[1])
        else:
            h = 1.0
        weights[item.key] = (m_raw[item.key] / m_total) ** alpha * crf ** (1.0 / alpha) * h
    return weights


def oracle_stabilize(incumbent, weights, delta):
    """Independent bubble over the pairwise overtaking threshold."""
    order = list(incumbent)
    swapped = True
    while swapped:
        swapped = False
        for k in range(len(order) - 1):
            if weights[order[k + 1]] > delta * weights[order[k]]:
                order[k], order[k + 1] = order[k + 1], order[k]
                swapped = True
    return order
