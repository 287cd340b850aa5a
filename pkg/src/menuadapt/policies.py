"""Target policies: map usage metrics to normalized item and group scores.

Every policy yields, per menu, a list of scored items sorted best-first
with scores normalized to sum 1 (all zero when there is no signal at all).
Ties are broken by document order, so two runs over the same input are
byte-identical. Recency-style components use reciprocal-rank weights
rather than raw timestamps: bounded, unit-free, and independent of the
clock origin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analytics import MetricsSnapshot
from .model import Group, Item, Menu, MenuModel

POLICY_NAMES = (
    "click-frequency",
    "visit-duration",
    "visit-frequency",
    "visit-recency",
    "serial-position",
    "access-rank",
)

HOUR_MS = 3_600_000


@dataclass(frozen=True)
class AccessRankParams:
    alpha: float = 1.0
    crf_half_life_ms: int = 24 * HOUR_MS
    delta_stability: float = 1.2
    time_of_day_clamp: tuple[float, float] = (0.8, 1.25)

    def validate(self) -> None:
        if self.alpha <= 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.crf_half_life_ms <= 0:
            raise ValueError(f"crf_half_life_ms must be positive, got {self.crf_half_life_ms}")
        if self.delta_stability < 1:
            raise ValueError(f"delta_stability must be >= 1, got {self.delta_stability}")
        lo, hi = self.time_of_day_clamp
        if not (0 < lo <= hi):
            raise ValueError(f"time_of_day_clamp must satisfy 0 < lo <= hi, got {lo, hi}")


@dataclass(frozen=True)
class PolicyConfig:
    policy_name: str = "click-frequency"
    serial_position_weights: tuple[float, float, float] = (0.4, 0.4, 0.2)
    access_rank_params: AccessRankParams = field(default_factory=AccessRankParams)

    def validate(self) -> None:
        if self.policy_name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.policy_name!r}; expected one of {POLICY_NAMES}")
        weights = self.serial_position_weights
        if len(weights) != 3 or any(w < 0 for w in weights):
            raise ValueError(f"serial_position_weights must be 3 non-negative reals, got {weights}")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"serial_position_weights must sum to 1, got {weights}")
        self.access_rank_params.validate()


@dataclass(frozen=True)
class ScoredItem:
    item: Item
    score: float


@dataclass(frozen=True)
class ScoredGroup:
    group: "Group"
    menu_index: int
    group_index: int
    score: float


@dataclass(frozen=True)
class AccessRankState:
    """Carried between scoring rounds; the ranking is what stability needs."""

    previous_ranking: tuple[str, ...] = ()
    crf: dict[str, float] = field(default_factory=dict)
    hour_histograms: dict[str, tuple[int, ...]] = field(default_factory=dict)


def _scored(menu: Menu, raw: dict[str, float]) -> list[ScoredItem]:
    """Normalize raw quantities over one menu and sort best-first.

    Scores sum to 1 when any raw signal is positive, otherwise they are
    all 0. Sorting is stable over document order, which implements the
    tie-break.
    """
    items = menu.items()
    total = sum(raw.values())
    if total <= 0:
        return [ScoredItem(item=i, score=0.0) for i in items]
    scored = [ScoredItem(item=i, score=raw.get(i.key, 0.0) / total) for i in items]
    scored.sort(key=lambda s: -s.score)
    return scored


def _reciprocal_rank(items: list[Item], key_ms: dict[str, int], newest_first: bool) -> dict[str, float]:
    """Reciprocal-rank raw weights over the items present in key_ms.

    Items are ranked by their key timestamp (ties fall back to document
    order, which the stable sort preserves); absent items get weight 0.
    """
    ranked = [i for i in items if i.key in key_ms]
    ranked.sort(key=lambda i: -key_ms[i.key] if newest_first else key_ms[i.key])
    return {item.key: 1.0 / rank for rank, item in enumerate(ranked, start=1)}


def score_click_frequency(metrics: MetricsSnapshot, model: MenuModel) -> list[ScoredItem]:
    """Normalized click counts."""
    out: list[ScoredItem] = []
    for menu in model.menus:
        raw = {i.key: float(metrics.item(i.key).click_count) for i in menu.items()}
        out.extend(_scored(menu, raw))
    return out


def score_visit_duration(metrics: MetricsSnapshot, model: MenuModel) -> list[ScoredItem]:
    """Normalized total dwell time on each item's target page; linkless items score 0."""
    out: list[ScoredItem] = []
    for menu in model.menus:
        raw = {
            i.key: float(metrics.page(i.page_target).total_duration_ms) for i in menu.items()
        }
        out.extend(_scored(menu, raw))
    return out


def score_visit_frequency(metrics: MetricsSnapshot, model: MenuModel) -> list[ScoredItem]:
    """Normalized visit counts of each item's target page."""
    out: list[ScoredItem] = []
    for menu in model.menus:
        raw = {i.key: float(metrics.page(i.page_target).visit_count) for i in menu.items()}
        out.extend(_scored(menu, raw))
    return out


def _last_visit_map(metrics: MetricsSnapshot, items: list[Item]) -> dict[str, int]:
    out = {}
    for item in items:
        last = metrics.page(item.page_target).last_visit_ms
        if last is not None:
            out[item.key] = last
    return out


def _first_visit_map(metrics: MetricsSnapshot, items: list[Item]) -> dict[str, int]:
    out = {}
    for item in items:
        first = metrics.page(item.page_target).first_visit_ms
        if first is not None:
            out[item.key] = first
    return out


def score_visit_recency(metrics: MetricsSnapshot, model: MenuModel) -> list[ScoredItem]:
    """Reciprocal-rank over most recent visit to the target page; unvisited items score 0."""
    out: list[ScoredItem] = []
    for menu in model.menus:
        items = menu.items()
        raw = _reciprocal_rank(items, _last_visit_map(metrics, items), newest_first=True)
        out.extend(_scored(menu, raw))
    return out


def score_serial_position(
    metrics: MetricsSnapshot, model: MenuModel, config: PolicyConfig
) -> list[ScoredItem]:
    """Weighted blend of visit frequency, visit recency, and primacy.

    Primacy favours pages visited earliest: reciprocal rank of the first
    visit in ascending order. The blend is renormalized to sum 1.
    """
    w_freq, w_rec, w_prim = config.serial_position_weights
    out: list[ScoredItem] = []
    for menu in model.menus:
        items = menu.items()
        counts = {i.key: float(metrics.page(i.page_target).visit_count) for i in items}
        count_total = sum(counts.values())
        freq = (
            {k: v / count_total for k, v in counts.items()} if count_total > 0 else {}
        )
        rec_raw = _reciprocal_rank(items, _last_visit_map(metrics, items), newest_first=True)
        rec_total = sum(rec_raw.values())
        rec = {k: v / rec_total for k, v in rec_raw.items()} if rec_total > 0 else {}
        prim_raw = _reciprocal_rank(items, _first_visit_map(metrics, items), newest_first=False)
        prim_total = sum(prim_raw.values())
        prim = {k: v / prim_total for k, v in prim_raw.items()} if prim_total > 0 else {}
        raw = {
            i.key: w_freq * freq.get(i.key, 0.0)
            + w_rec * rec.get(i.key, 0.0)
            + w_prim * prim.get(i.key, 0.0)
            for i in items
        }
        out.extend(_scored(menu, raw))
    return out


# --- AccessRank ----------------------------------------------------------


def _click_sequence(metrics: MetricsSnapshot, model: MenuModel) -> list[tuple[int, str]]:
    """Global click sequence (t, item-key), reconstructed from per-item timestamps.

    Simultaneous clicks (same millisecond) order by document position so
    the sequence is deterministic.
    """
    position = {item.key: n for n, item in enumerate(model.items())}
    merged = [
        (t, position[key], key)
        for key, im in metrics.items.items()
        if key in position
        for t in im.click_timestamps
    ]
    merged.sort()
    return [(t, key) for t, _, key in merged]


def _markov_estimates(sequence: list[tuple[int, str]], items: list[Item]) -> dict[str, float]:
    """Add-one-smoothed first-order transition estimate out of the latest item.

    m_i is the normalized count of historical accesses to i that directly
    followed an access to the most recently accessed item.
    """
    raw = {item.key: 1.0 for item in items}
    if sequence:
        previous = sequence[-1][1]
        for (_, a), (_, b) in zip(sequence, sequence[1:]):
            if a == previous and b in raw:
                raw[b] += 1.0
    total = sum(raw.values())
    return {k: v / total for k, v in raw.items()}


def _crf(timestamps: tuple[int, ...], now_ms: int, half_life_ms: int) -> float:
    """Combined recency-frequency: exponentially decayed access count."""
    return sum(2.0 ** (-(now_ms - t) / half_life_ms) for t in timestamps)


def _hour_histogram(timestamps: tuple[int, ...]) -> tuple[int, ...]:
    buckets = [0] * 24
    for t in timestamps:
        buckets[(t // HOUR_MS) % 24] += 1
    return tuple(buckets)


def _time_of_day_factor(
    histogram: tuple[int, ...], now_ms: int, clamp: tuple[float, float]
) -> float:
    """Ratio of accesses in the current hour bucket vs uniform expectation, clamped."""
    total = sum(histogram)
    if total == 0:
        return 1.0
    bucket = (now_ms // HOUR_MS) % 24
    ratio = histogram[bucket] / (total / 24.0)
    lo, hi = clamp
    return min(max(ratio, lo), hi)


def stabilize_ranking(
    incumbent: list[str], weights: dict[str, float], delta: float
) -> list[str]:
    """Apply the rank-stability rule to an incumbent order.

    An item overtakes the item directly above it only when its weight
    exceeds the incumbent's by the multiplicative margin delta; otherwise
    the previous relative order is retained. Swapping repeats until no
    adjacent pair crosses the threshold (each swap fixes a strict
    inversion, so this terminates).
    """
    order = list(incumbent)
    changed = True
    while changed:
        changed = False
        for k in range(len(order) - 1):
            above, below = order[k], order[k + 1]
            if weights[below] > delta * weights[above]:
                order[k], order[k + 1] = below, above
                changed = True
    return order


def access_rank_weights(
    metrics: MetricsSnapshot,
    model: MenuModel,
    params: AccessRankParams,
    now_ms: int,
) -> dict[str, float]:
    """Raw AccessRank weight per item: w = m^alpha * crf^(1/alpha) * h.

    m is the smoothed Markov transition estimate (normalized per menu),
    crf the exponentially decayed click count, and h the clamped
    time-of-day factor. Never-clicked items have crf 0, hence weight 0.
    """
    sequence = _click_sequence(metrics, model)
    weights: dict[str, float] = {}
    for menu in model.menus:
        items = menu.items()
        markov = _markov_estimates(sequence, items)
        for item in items:
            ts = metrics.item(item.key).click_timestamps
            crf = _crf(ts, now_ms, params.crf_half_life_ms)
            h = _time_of_day_factor(_hour_histogram(ts), now_ms, params.time_of_day_clamp)
            weights[item.key] = (
                markov[item.key] ** params.alpha * crf ** (1.0 / params.alpha) * h
            )
    return weights


def score_access_rank(
    metrics: MetricsSnapshot,
    model: MenuModel,
    config: PolicyConfig,
    state: AccessRankState,
    now_ms: int,
) -> tuple[list[ScoredItem], AccessRankState]:
    """Stability-damped ranking over AccessRank weights.

    The returned list is in ranking order, which may retain a previously
    higher-ranked item above a slightly heavier challenger (that is the
    point of the stability component); scores are the weights normalized
    per menu. The new state carries the ranking for the next round.
    """
    params = config.access_rank_params
    weights = access_rank_weights(metrics, model, params, now_ms)
    out: list[ScoredItem] = []
    ranking_keys: list[str] = []
    crf_snapshot: dict[str, float] = {}
    histograms: dict[str, tuple[int, ...]] = {}
    for menu in model.menus:
        items = menu.items()
        by_key = {i.key: i for i in items}
        incumbent = [k for k in state.previous_ranking if k in by_key]
        seen = set(incumbent)
        for item in items:  # new items enter at the bottom, document order
            if item.key not in seen:
                incumbent.append(item.key)
                seen.add(item.key)
        order = stabilize_ranking(incumbent, weights, params.delta_stability)
        total = sum(weights[i.key] for i in items)
        for key in order:
            score = weights[key] / total if total > 0 else 0.0
            out.append(ScoredItem(item=by_key[key], score=score))
        ranking_keys.extend(order)
        for item in items:
            ts = metrics.item(item.key).click_timestamps
            crf_snapshot[item.key] = _crf(ts, now_ms, params.crf_half_life_ms)
            histograms[item.key] = _hour_histogram(ts)
    new_state = AccessRankState(
        previous_ranking=tuple(ranking_keys),
        crf=crf_snapshot,
        hour_histograms=histograms,
    )
    return out, new_state


def score_groups(item_scores: list[ScoredItem], model: MenuModel) -> list[ScoredGroup]:
    """Group score = sum of member item scores, renormalized per menu."""
    sums: dict[tuple[int, int], float] = {}
    for scored in item_scores:
        key = (scored.item.menu_index, scored.item.group_index)
        sums[key] = sums.get(key, 0.0) + scored.score
    out: list[ScoredGroup] = []
    for mi, menu in enumerate(model.menus):
        raw = [sums.get((mi, gi), 0.0) for gi in range(len(menu.groups))]
        total = sum(raw)
        scored = [
            ScoredGroup(
                group=group,
                menu_index=mi,
                group_index=gi,
                score=raw[gi] / total if total > 0 else 0.0,
            )
            for gi, group in enumerate(menu.groups)
        ]
        scored.sort(key=lambda s: -s.score)
        out.extend(scored)
    return out


def score_items(
    config: PolicyConfig,
    metrics: MetricsSnapshot,
    model: MenuModel,
    state: AccessRankState | None = None,
    now_ms: int = 0,
) -> tuple[list[ScoredItem], list[ScoredGroup], AccessRankState]:
    """Dispatch to the configured policy; returns (items, groups, new state)."""
    config.validate()
    state = state if state is not None else AccessRankState()
    name = config.policy_name
    if name == "click-frequency":
        items = score_click_frequency(metrics, model)
    elif name == "visit-duration":
        items = score_visit_duration(metrics, model)
    elif name == "visit-frequency":
        items = score_visit_frequency(metrics, model)
    elif name == "visit-recency":
        items = score_visit_recency(metrics, model)
    elif name == "serial-position":
        items = score_serial_position(metrics, model, config)
    elif name == "access-rank":
        items, state = score_access_rank(metrics, model, config, state, now_ms)
    else:  # pragma: no cover - validate() already rejected
        raise ValueError(name)
    return items, score_groups(items, model), state
