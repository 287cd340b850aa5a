"""Message interface between the browser demo and the engine.

The demo talks to the engine exclusively through handle_message(name,
json) -> json. The engine keeps its own parsed copy of the page and a
handle per boot; the demo only executes returned plans on the live DOM
and persists returned store text. All scoring stays on this side of the
boundary.
"""

import json

from menuadapt.dom import parse_document
from menuadapt.engine import (
    EngineConfig,
    MemoryStore,
    clear_history,
    init,
    notify_click,
    notify_page_exit,
    policy_config_from_obj,
    selector_sets_from_obj,
    set_policy,
    set_style,
    style_config_from_obj,
)
from menuadapt.eventlog import serialize
from menuadapt.model import normalize_page_path

_handle = None
_clock = {"now": 0}


def _scores(handle):
    if handle.model is None:
        return []
    return [
        {
            "id": s.item.key,
            "label": s.item.label,
            "page_target": s.item.page_target,
            "menu": s.item.menu_index,
            "score": s.score,
        }
        for s in handle.scored_items
    ]


def _plan(handle):
    return handle.plan.to_obj()


def _state(handle, with_store=False):
    out = {
        "ok": True,
        "scores": _scores(handle),
        "plan": _plan(handle),
        "warnings": list(handle.warnings),
        "policy": handle.config.policy.policy_name,
        "style": list(handle.config.style.members()),
        "events": len(handle.db),
    }
    if with_store:
        out["store_text"] = serialize(handle.db)
    return out


def _boot(payload):
    global _handle
    _clock["now"] = payload.get("now", 0)
    page = normalize_page_path(payload.get("page") or "/")
    config = EngineConfig(
        selectors=selector_sets_from_obj(payload["selectors"]),
        policy=policy_config_from_obj(payload.get("policy") or {}),
        style=style_config_from_obj(payload.get("style") or {}),
        store_location=MemoryStore(payload.get("store_text")),
        current_page=page,
        clock=lambda: _clock["now"],
    )
    _handle = init(parse_document(payload["html"]), config)
    return _state(_handle)


def _require_handle():
    if _handle is None:
        raise RuntimeError("boot must be called before other messages")
    return _handle


def handle_message(name: str, payload_json: str) -> str:
    payload = json.loads(payload_json) if payload_json else {}
    if "now" in payload:
        _clock["now"] = payload["now"]
    try:
        if name == "boot":
            result = _boot(payload)
        else:
            handle = _require_handle()
            if name == "notify-click":
                notify_click(handle, payload["item"], payload.get("now"))
                result = {"ok": True, "store_text": handle.store.text, "events": len(handle.db)}
            elif name == "notify-page-exit":
                notify_page_exit(handle, payload.get("now"))
                result = {"ok": True, "store_text": handle.store.text, "events": len(handle.db)}
            elif name == "set-policy":
                set_policy(handle, policy_config_from_obj(payload["policy"]))
                result = _state(handle)
            elif name == "set-style":
                set_style(handle, style_config_from_obj(payload["style"]))
                result = _state(handle)
            elif name == "get-scores":
                result = {"ok": True, "scores": _scores(handle)}
            elif name == "get-plan":
                result = {"ok": True, "plan": _plan(handle)}
            elif name == "clear-history":
                clear_history(handle)
                result = _state(handle, with_store=True)
            elif name == "export-store":
                result = {"ok": True, "store_text": serialize(handle.db), "events": len(handle.db)}
            else:
                result = {"ok": False, "error": f"unknown message: {name}"}
    except Exception as exc:  # surface errors as data, not FFI crashes
        result = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
    return json.dumps(result)
