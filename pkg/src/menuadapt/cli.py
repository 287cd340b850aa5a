"""Command-line front end.

Subcommands:
  adapt   -- apply one policy x style combination to an HTML file with a
             replayed interaction log, writing adapted HTML and a JSON report
  replay  -- stream a log into a fresh store, reporting ranking evolution
  matrix  -- run all 24 policy x style combinations and report per cell
  bench   -- time the full pipeline on a synthetic menu and random log

Exit codes: 0 ok, 2 configuration error (selectors, policy, style),
3 data error (unreadable or corrupt log).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from pathlib import Path

from . import engine as engine_mod
from . import synth
from .analytics import Analyzer
from .dom import canonical_html, parse_document
from .errors import CorruptStore, InvalidSelector, NoMenuMatched
from .eventlog import EventDatabase, deserialize, load_events_text, serialize
from .model import extract_all
from .policies import POLICY_NAMES, AccessRankState, PolicyConfig, score_items
from .selectors import SelectorSet
from .styles import STYLE_NAMES, SIZE_FUNCTION, StyleConfig, build_plan
from .styles import apply as apply_plan
from .styles import cancel as cancel_plan
from .styles import top_n as resolve_top_n

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

_DEFAULT_SELECTORS = [SelectorSet(menu=".menu", item=".item", group=".group")]


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_text(path: str, code: int, what: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(f"cannot read {what} {path!r}: {exc}", code) from None


def _load_selectors(path: str | None) -> list[SelectorSet]:
    if path is None:
        return list(_DEFAULT_SELECTORS)
    text = _read_text(path, EXIT_CONFIG, "selector config")
    try:
        return engine_mod.selector_sets_from_obj(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise _CliError(f"bad selector config {path!r}: {exc}", EXIT_CONFIG) from None


def _load_db(path: str | None) -> EventDatabase:
    db = EventDatabase()
    if path is None:
        return db
    text = _read_text(path, EXIT_DATA, "log")
    try:
        for event in load_events_text(text):
            db.append_event(event)
    except CorruptStore as exc:
        raise _CliError(f"corrupt log {path!r}: {exc}", EXIT_DATA) from None
    return db


def _policy_config(args) -> PolicyConfig:
    try:
        config = PolicyConfig(policy_name=args.policy)
        config.validate()
        return config
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_CONFIG) from None


def _parse_top_n(raw) -> int | str:
    if raw == SIZE_FUNCTION or isinstance(raw, int):
        return raw
    try:
        return int(raw)
    except ValueError:
        raise _CliError(f"--top-n must be an integer or {SIZE_FUNCTION!r}", EXIT_CONFIG) from None


def _style_config(args) -> StyleConfig:
    names = tuple(part.strip() for part in args.style.split(",") if part.strip())
    try:
        config = StyleConfig(
            style_name=names if len(names) != 1 else names[0],
            top_n=_parse_top_n(args.top_n),
            min_visible_on_fold=args.min_visible,
        )
        config.validate()
        return config
    except ValueError as exc:
        raise _CliError(str(exc), EXIT_CONFIG) from None


def _write_json(path: str | None, obj: dict) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _scores_obj(scored_items) -> list[dict]:
    return [
        {
            "id": s.item.key,
            "label": s.item.label,
            "page_target": s.item.page_target,
            "menu": s.item.menu_index,
            "score": s.score,
        }
        for s in scored_items
    ]


def _run_pipeline(
    doc,
    selector_sets: list[SelectorSet],
    db: EventDatabase,
    policy: PolicyConfig,
    style: StyleConfig,
    now: int,
    state: AccessRankState | None = None,
):
    """Shared adapt pipeline: extract -> metrics -> score -> plan -> apply."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    model = extract_all(doc, selector_sets)
    t1 = time.perf_counter()
    metrics = Analyzer().metrics(db, model)
    t2 = time.perf_counter()
    scored_items, scored_groups, state = score_items(
        policy, metrics, model, state, now_ms=now
    )
    t3 = time.perf_counter()
    plan = build_plan(style, scored_items, scored_groups, model)
    t4 = time.perf_counter()
    applied = apply_plan(plan, doc, model)
    t5 = time.perf_counter()
    timings.update(
        {
            "extract": (t1 - t0) * 1000,
            "metrics": (t2 - t1) * 1000,
            "policy": (t3 - t2) * 1000,
            "plan": (t4 - t3) * 1000,
            "apply": (t5 - t4) * 1000,
            "total": (t5 - t0) * 1000,
        }
    )
    return model, scored_items, scored_groups, plan, applied, timings, state


def cmd_adapt(args) -> int:
    selector_sets = _load_selectors(args.selectors)
    policy = _policy_config(args)
    style = _style_config(args)
    db = _load_db(args.log)
    html_text = _read_text(args.html, EXIT_CONFIG, "html")
    doc = parse_document(html_text)
    now = args.now if args.now is not None else engine_mod.now_ms()

    try:
        model, scored_items, scored_groups, plan, applied, timings, _ = _run_pipeline(
            doc, selector_sets, db, policy, style, now
        )
    except InvalidSelector as exc:
        raise _CliError(f"invalid selector: {exc}", EXIT_CONFIG) from None
    except NoMenuMatched as exc:
        raise _CliError(str(exc), EXIT_CONFIG) from None

    # An empty plan means no mutation: the input passes through untouched.
    adapted = canonical_html(doc) if not plan.empty else html_text
    if args.out:
        Path(args.out).write_text(adapted, encoding="utf-8")

    report = {
        "policy": policy.policy_name,
        "style": list(style.members()) if len(style.members()) > 1 else style.members()[0],
        "n": style.top_n,
        "menus": [
            {
                "id": menu.key,
                "item_count": len(menu.items()),
                "n_resolved": resolve_top_n(len(menu.items()), style),
            }
            for menu in model.menus
        ],
        "items": _scores_obj(scored_items),
        "plan": plan.to_obj(),
        # Wall times are inherently run-dependent; a frozen clock promises
        # byte-identical outputs, so they are withheld under --now.
        "timings_ms": None if args.now is not None else timings,
        "now": now,
        "events": len(db),
    }
    if args.report:
        _write_json(args.report, report)
    elif args.out is None:
        _write_json(None, report)
    return EXIT_OK


def cmd_replay(args) -> int:
    selector_sets = _load_selectors(args.selectors)
    policy = _policy_config(args)
    db_full = _load_db(args.log)
    html_text = _read_text(args.html, EXIT_CONFIG, "html")
    doc = parse_document(html_text)
    now = args.now if args.now is not None else engine_mod.now_ms()

    try:
        model = extract_all(doc, selector_sets)
    except (InvalidSelector, NoMenuMatched) as exc:
        raise _CliError(str(exc), EXIT_CONFIG) from None

    every = args.every if args.every and args.every > 0 else max(len(db_full), 1)
    analyzer = Analyzer()
    db = EventDatabase()
    state: AccessRankState | None = None
    snapshots = []
    for count, event in enumerate(db_full.events, start=1):
        db.append_event(event)
        if count % every == 0 or count == len(db_full):
            metrics = analyzer.metrics(db, model)
            scored_items, _, state = score_items(policy, metrics, model, state, now_ms=now)
            snapshots.append(
                {
                    "after_events": count,
                    "ranking": [s.item.key for s in scored_items],
                    "labels": [s.item.label for s in scored_items],
                    "scores": [s.score for s in scored_items],
                }
            )
    report = {
        "policy": policy.policy_name,
        "snapshot_every": every,
        "total_events": len(db_full),
        "snapshots": snapshots,
    }
    _write_json(args.report, report)
    return EXIT_OK


def cmd_matrix(args) -> int:
    selector_sets = _load_selectors(args.selectors)
    db = _load_db(args.log)
    html_text = _read_text(args.html, EXIT_CONFIG, "html")
    now = args.now if args.now is not None else engine_mod.now_ms()

    cells = []
    succeeded = 0
    for policy_name in POLICY_NAMES:
        for style_name in STYLE_NAMES:
            policy = PolicyConfig(policy_name=policy_name)
            style = StyleConfig(
                style_name=style_name,
                top_n=_parse_top_n(args.top_n),
                min_visible_on_fold=args.min_visible,
            )
            doc = parse_document(html_text)
            cell = {"policy": policy_name, "style": style_name}
            try:
                t0 = time.perf_counter()
                _, scored_items, _, plan, _, _, _ = _run_pipeline(
                    doc, selector_sets, db, policy, style, now
                )
                elapsed = (time.perf_counter() - t0) * 1000
                adapted = canonical_html(doc) if not plan.empty else html_text
                cell.update(
                    {
                        "ok": True,
                        "error": None,
                        "output_sha256": hashlib.sha256(adapted.encode()).hexdigest(),
                        "timing_ms": elapsed,
                        "scores": [s.score for s in scored_items],
                        "ranking": [s.item.key for s in scored_items],
                        "mutations": len(plan.mutations),
                    }
                )
                succeeded += 1
            except (InvalidSelector, NoMenuMatched) as exc:
                cell.update({"ok": False, "error": str(exc)})
            cells.append(cell)
    report = {
        "total": len(cells),
        "succeeded": succeeded,
        "cells": cells,
    }
    _write_json(args.report, report)
    return EXIT_OK if succeeded == len(cells) else EXIT_CONFIG


def cmd_bench(args) -> int:
    rng = random.Random(args.seed)
    html_text = synth.menu_html(args.groups, args.items)
    parse_start = time.perf_counter()
    doc = parse_document(html_text)
    parse_ms = (time.perf_counter() - parse_start) * 1000

    selector_sets = list(_DEFAULT_SELECTORS)
    model = extract_all(doc, selector_sets)
    db = EventDatabase()
    for event in synth.random_events(model, args.events, rng):
        db.append_event(event)
    store_text = serialize(db)
    policy = _policy_config(args)
    style = _style_config(args)
    now = args.now if args.now is not None else engine_mod.now_ms()

    runs = []
    for _ in range(max(args.reps, 1)):
        t0 = time.perf_counter()
        run_db = deserialize(store_text)
        _, _, _, _, applied, timings, _ = _run_pipeline(
            doc, selector_sets, run_db, policy, style, now
        )
        elapsed = (time.perf_counter() - t0) * 1000
        cancel_plan(applied, doc)
        runs.append({"pipeline_ms": elapsed, "stages": timings})

    times = [r["pipeline_ms"] for r in runs]
    report = {
        "menu": {"groups": args.groups, "items_per_group": args.items,
                 "total_items": args.groups * args.items},
        "events": args.events,
        "repetitions": len(runs),
        "policy": policy.policy_name,
        "style": list(style.members()) if len(style.members()) > 1 else style.members()[0],
        "parse_ms": parse_ms,
        "pipeline_mean_ms": sum(times) / len(times),
        "pipeline_max_ms": max(times),
        "store_bytes": len(store_text.encode("utf-8")),
        "runs": runs,
    }
    _write_json(args.report, report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="menuadapt", description="Self-adapting menus: score, plan, apply."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_style=True):
        p.add_argument("--selectors", help="selector config JSON path")
        p.add_argument("--log", help="interaction log (store JSON or JSON Lines)")
        p.add_argument("--policy", default="click-frequency", choices=POLICY_NAMES)
        if with_style:
            p.add_argument("--style", default="highlight",
                           help="style name or comma-separated composite")
            p.add_argument("--top-n", dest="top_n", default=SIZE_FUNCTION,
                           help=f"fixed N or {SIZE_FUNCTION!r} for the size function")
            p.add_argument("--min-visible", dest="min_visible", type=int, default=3,
                           help="minimum items kept visible per group when folding")
        p.add_argument("--now", type=int, default=None,
                       help="freeze the clock at this epoch-ms for reproducible output")
        p.add_argument("--report", help="report JSON path ('-' for stdout)")

    p_adapt = sub.add_parser("adapt", help="adapt an HTML file with a replayed log")
    p_adapt.add_argument("--html", required=True)
    common(p_adapt)
    p_adapt.add_argument("--out", help="adapted HTML output path")
    p_adapt.set_defaults(func=cmd_adapt)

    p_replay = sub.add_parser("replay", help="stream a log, reporting ranking evolution")
    p_replay.add_argument("--html", required=True)
    common(p_replay, with_style=False)
    p_replay.add_argument("--every", type=int, default=0,
                          help="snapshot the ranking every N events (default: once at the end)")
    p_replay.set_defaults(func=cmd_replay)

    p_matrix = sub.add_parser("matrix", help="run all policy x style combinations")
    p_matrix.add_argument("--html", required=True)
    p_matrix.add_argument("--selectors")
    p_matrix.add_argument("--log")
    p_matrix.add_argument("--top-n", dest="top_n", default=SIZE_FUNCTION)
    p_matrix.add_argument("--min-visible", dest="min_visible", type=int, default=3)
    p_matrix.add_argument("--now", type=int, default=None)
    p_matrix.add_argument("--report")
    p_matrix.set_defaults(func=cmd_matrix)

    p_bench = sub.add_parser("bench", help="benchmark the pipeline on a synthetic menu")
    p_bench.add_argument("--groups", type=int, default=50)
    p_bench.add_argument("--items", type=int, default=10)
    p_bench.add_argument("--events", type=int, default=5000)
    p_bench.add_argument("--reps", type=int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--policy", default="click-frequency", choices=POLICY_NAMES)
    p_bench.add_argument("--style", default="highlight")
    p_bench.add_argument("--top-n", dest="top_n", default=SIZE_FUNCTION)
    p_bench.add_argument("--min-visible", dest="min_visible", type=int, default=3)
    p_bench.add_argument("--now", type=int, default=None)
    p_bench.add_argument("--report")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"menuadapt: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
