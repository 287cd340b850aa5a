"""Pipeline orchestration: store -> log -> metrics -> policy -> style -> apply.

One engine handle owns one document. Adaptation is computed once per page
load (on init); during use the engine only logs. Switching policy or
style at runtime is the explicit exception: it cancels the current
adaptation and applies the new one in one step. Everything is local --
the only write target is the configured store.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from . import styles as styles_mod
from .analytics import Analyzer, MetricsSnapshot
from .dom import DocumentTree
from .errors import CorruptStore, NoMenuMatched
from .eventlog import EventDatabase, deserialize, serialize
from .model import MenuModel, extract_all
from .policies import AccessRankState, PolicyConfig, ScoredGroup, ScoredItem, score_items
from .selectors import SelectorSet
from .styles import AdaptationPlan, AppliedState, StyleConfig


def now_ms() -> int:
    return int(time.time() * 1000)


class MemoryStore:
    """In-memory store; also the adapter the browser bridge feeds text through."""

    def __init__(self, text: str | None = None):
        self.text = text

    def load(self) -> str | None:
        return self.text

    def save(self, text: str) -> None:
        self.text = text


class FileStore:
    """Single-file store with atomic whole-document replacement."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def load(self) -> str | None:
        try:
            return self.path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None

    def save(self, text: str) -> None:
        # Write-temp-then-swap so a crash never leaves a torn store.
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=self.path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def _as_store(location) -> MemoryStore | FileStore:
    if isinstance(location, (str, Path)):
        return FileStore(location)
    return location


@dataclass
class EngineConfig:
    selectors: list[SelectorSet]
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    style: StyleConfig = field(default_factory=StyleConfig)
    store_location: object = None  # path or store object; None = in-memory
    current_page: str | None = None
    clock: Callable[[], int] = now_ms


@dataclass
class EngineHandle:
    config: EngineConfig
    doc: DocumentTree
    store: MemoryStore | FileStore
    db: EventDatabase
    analyzer: Analyzer
    model: MenuModel | None = None  # None when the engine initialized inert
    metrics: MetricsSnapshot | None = None
    scored_items: list[ScoredItem] = field(default_factory=list)
    scored_groups: list[ScoredGroup] = field(default_factory=list)
    plan: AdaptationPlan = field(default_factory=AdaptationPlan)
    applied: AppliedState | None = None
    access_rank_state: AccessRankState = field(default_factory=AccessRankState)
    visit_enter_ms: int = 0
    warnings: list[str] = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=dict)


def _persist(handle: EngineHandle) -> None:
    handle.store.save(serialize(handle.db))


def _adapt(handle: EngineHandle, now: int) -> None:
    """Metrics -> scores -> plan -> apply, with per-stage wall times."""
    if handle.model is None:
        return
    t0 = time.perf_counter()
    handle.metrics = handle.analyzer.metrics(handle.db, handle.model)
    t1 = time.perf_counter()
    handle.scored_items, handle.scored_groups, handle.access_rank_state = score_items(
        handle.config.policy,
        handle.metrics,
        handle.model,
        handle.access_rank_state,
        now_ms=now,
    )
    t2 = time.perf_counter()
    handle.plan = styles_mod.build_plan(
        handle.config.style, handle.scored_items, handle.scored_groups, handle.model
    )
    t3 = time.perf_counter()
    # An empty plan leaves the document in its original state; applied
    # stays absent so the handle invariant holds.
    handle.applied = (
        styles_mod.apply(handle.plan, handle.doc, handle.model) if not handle.plan.empty else None
    )
    t4 = time.perf_counter()
    handle.timings_ms.update(
        {
            "metrics": (t1 - t0) * 1000,
            "policy": (t2 - t1) * 1000,
            "plan": (t3 - t2) * 1000,
            "apply": (t4 - t3) * 1000,
        }
    )


def init(doc: DocumentTree, config: EngineConfig) -> EngineHandle:
    """Boot the engine on a fully parsed document.

    Loads (or freshly creates) the store, extracts menus, records the
    visit start, and computes and applies the adaptation. A corrupt store
    or unmatched selectors degrade gracefully: the engine stays functional
    and reports the problem through handle.warnings.
    """
    config.policy.validate()
    config.style.validate()
    store = _as_store(config.store_location) if config.store_location is not None else MemoryStore()
    handle = EngineHandle(
        config=config, doc=doc, store=store, db=EventDatabase(), analyzer=Analyzer()
    )

    t0 = time.perf_counter()
    text = store.load()
    if text is not None:
        try:
            handle.db = deserialize(text)
        except CorruptStore as exc:
            handle.warnings.append(f"store was corrupt, starting fresh: {exc}")
            handle.db = EventDatabase()
    t1 = time.perf_counter()
    handle.timings_ms["load_store"] = (t1 - t0) * 1000

    try:
        handle.model = extract_all(doc, config.selectors, config.current_page)
    except NoMenuMatched as exc:
        handle.model = None
        handle.warnings.append(f"no menu matched, engine inert: {exc}")
    t2 = time.perf_counter()
    handle.timings_ms["extract"] = (t2 - t1) * 1000

    handle.visit_enter_ms = config.clock()
    _adapt(handle, handle.visit_enter_ms)
    handle.timings_ms["total"] = (time.perf_counter() - t0) * 1000
    return handle


def notify_click(handle: EngineHandle, item_key: str, t: int | None = None) -> None:
    """Log a click on a menu item and persist. Re-adaptation waits for the
    next page load; mid-use reshuffling would fight the user."""
    page = handle.config.current_page or "/"
    handle.db.log_click(item_key, page, t if t is not None else handle.config.clock())
    _persist(handle)


def notify_page_exit(handle: EngineHandle, t: int | None = None) -> None:
    """Close the visit interval opened at init and persist atomically."""
    leave = t if t is not None else handle.config.clock()
    if leave < handle.visit_enter_ms:
        handle.warnings.append(
            f"page exit at {leave} precedes init at {handle.visit_enter_ms}; clamped"
        )
        leave = handle.visit_enter_ms
    page = handle.config.current_page or "/"
    handle.db.log_visit(page, handle.visit_enter_ms, leave)
    _persist(handle)


def _cancel_current(handle: EngineHandle) -> None:
    if handle.applied is not None:
        styles_mod.cancel(handle.applied, handle.doc, handle.model)
        handle.applied = None
        handle.plan = AdaptationPlan()


def set_policy(handle: EngineHandle, policy: PolicyConfig) -> None:
    """Swap the target policy: cancel, rescore, re-apply in one step."""
    policy.validate()
    handle.config = replace(handle.config, policy=policy)
    _cancel_current(handle)
    _adapt(handle, handle.config.clock())


def set_style(handle: EngineHandle, style: StyleConfig) -> None:
    """Swap the adaptation style under the current policy."""
    style.validate()
    handle.config = replace(handle.config, style=style)
    _cancel_current(handle)
    _adapt(handle, handle.config.clock())


def cancel_all(handle: EngineHandle) -> None:
    """Restore the original document; the handle keeps logging."""
    _cancel_current(handle)


def clear_history(handle: EngineHandle) -> None:
    """Forget everything: empty store (revision 0), adaptation cancelled."""
    handle.db = EventDatabase()
    handle.analyzer.invalidate()  # revision restarts, so the cache key would lie
    handle.access_rank_state = AccessRankState()
    _persist(handle)
    _cancel_current(handle)
    _adapt(handle, handle.config.clock())


# --- Config file loading ---------------------------------------------------


def selector_sets_from_obj(obj: dict) -> list[SelectorSet]:
    """Parse the selector config shape {"menus":[{"menu","group","item"}]}."""
    if not isinstance(obj, dict) or not isinstance(obj.get("menus"), list) or not obj["menus"]:
        raise ValueError('selector config must be {"menus": [{...}, ...]}')
    sets = []
    for entry in obj["menus"]:
        if not isinstance(entry, dict) or "menu" not in entry or "item" not in entry:
            raise ValueError(f"selector entry needs 'menu' and 'item': {entry!r}")
        sets.append(
            SelectorSet(menu=entry["menu"], item=entry["item"], group=entry.get("group"))
        )
    return sets


def load_selector_config(path: str | Path) -> list[SelectorSet]:
    return selector_sets_from_obj(json.loads(Path(path).read_text(encoding="utf-8")))


def policy_config_from_obj(obj: dict) -> PolicyConfig:
    from .policies import AccessRankParams

    kwargs = {}
    if "policy_name" in obj:
        kwargs["policy_name"] = obj["policy_name"]
    if "serial_position_weights" in obj:
        kwargs["serial_position_weights"] = tuple(obj["serial_position_weights"])
    if "access_rank_params" in obj:
        params = obj["access_rank_params"]
        kwargs["access_rank_params"] = AccessRankParams(
            alpha=params.get("alpha", 1.0),
            crf_half_life_ms=params.get("crf_half_life_ms", 24 * 3_600_000),
            delta_stability=params.get("delta_stability", 1.2),
            time_of_day_clamp=tuple(params.get("time_of_day_clamp", (0.8, 1.25))),
        )
    config = PolicyConfig(**kwargs)
    config.validate()
    return config


def style_config_from_obj(obj: dict) -> StyleConfig:
    kwargs = {}
    if "style_name" in obj:
        name = obj["style_name"]
        kwargs["style_name"] = tuple(name) if isinstance(name, list) else name
    if "top_n" in obj:
        kwargs["top_n"] = obj["top_n"]
    if "min_visible_on_fold" in obj:
        kwargs["min_visible_on_fold"] = obj["min_visible_on_fold"]
    config = StyleConfig(**kwargs)
    config.validate()
    return config


def engine_config_from_obj(obj: dict) -> EngineConfig:
    """Engine config file: selectors + policy + style + store path."""
    return EngineConfig(
        selectors=selector_sets_from_obj(obj.get("selectors", obj)),
        policy=policy_config_from_obj(obj.get("policy", {})),
        style=style_config_from_obj(obj.get("style", {})),
        store_location=obj.get("store"),
        current_page=obj.get("current_page"),
    )


def load_engine_config(path: str | Path) -> EngineConfig:
    return engine_config_from_obj(json.loads(Path(path).read_text(encoding="utf-8")))
