// Scripted browser session covering the demo acceptance loop: visit,
// click, reload, personalize at runtime, clear, and export back into the
// command-line tool. The engine runs for real (WebAssembly build); pages
// are jsdom windows sharing one per-origin storage.

import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { beforeAll, describe, expect, it } from "vitest";
import { JSDOM, VirtualConsole } from "jsdom";

import { Demo } from "../src/demo.js";
import { MemoryStorage, STORE_KEY } from "../src/store.js";
import type { EngineBridge } from "../src/bridge.js";
import {
  FakeClock,
  REPO_ROOT,
  engineBridge,
  highlightedLabels,
  itemByLabel,
  menuLabels,
  pageDom,
  sitePagePath,
} from "./helpers.js";

const ORIGINAL_MENU = [
  "Main page",
  "Contents",
  "Featured contents",
  "Current events",
  "Random article",
  "Donate to Wikipedia",
  "Wikipedia store",
];

let bridge: EngineBridge;

beforeAll(async () => {
  bridge = await engineBridge();
});

function bootPage(name: string, storage: MemoryStorage, clock: FakeClock) {
  const dom = pageDom(name);
  const doc = dom.window.document;
  const demo = Demo.boot({
    bridge,
    document: doc,
    storage,
    page: `/${name}`,
    now: clock.now,
    panelHost: doc.getElementById("sam-panel"),
  });
  return { dom, doc, demo };
}

function leavePage(dom: JSDOM, clock: FakeClock, dwellMs: number) {
  clock.advance(dwellMs);
  dom.window.dispatchEvent(new dom.window.Event("pagehide"));
}

function runCli(args: string[]): void {
  execFileSync("python3", ["-m", "menuadapt.cli", ...args], {
    cwd: REPO_ROOT,
    stdio: ["ignore", "pipe", "pipe"],
  });
}

function highlightedInFile(path: string): string[] {
  const dom = new JSDOM(readFileSync(path, "utf-8"), {
    virtualConsole: new VirtualConsole(),
  });
  return highlightedLabels(dom.window.document);
}

describe("demo loop", () => {
  it("boots cold with the original, unadapted menu", () => {
    const { doc, demo } = bootPage("index.html", new MemoryStorage(), new FakeClock());
    expect(menuLabels(doc)).toEqual(ORIGINAL_MENU);
    expect(highlightedLabels(doc)).toEqual([]);
    expect(demo.eventCount()).toBe(0);
  });

  it("runs the full session: clicks, reload, style switch, clear", () => {
    const clock = new FakeClock();
    const storage = new MemoryStorage();

    // first visit: click one item three times, then leave
    const first = bootPage("index.html", storage, clock);
    const pristineNav = first.doc.querySelector("nav.menu")!.outerHTML;
    expect(highlightedLabels(first.doc)).toEqual([]);
    const target = itemByLabel(first.doc, "Featured contents");
    for (let k = 0; k < 3; k++) {
      clock.advance(1_000);
      target.click();
    }
    leavePage(first.dom, clock, 8_000);
    expect(storage.getItem(STORE_KEY)).toContain('"revision":4'); // 3 clicks + 1 visit

    // reload under the default click-frequency + highlight config
    clock.advance(60_000);
    const second = bootPage("index.html", storage, clock);
    expect(highlightedLabels(second.doc)).toEqual(["Featured contents"]);
    expect(menuLabels(second.doc)).toEqual(ORIGINAL_MENU); // highlight does not reorder

    // turn the score overlay on and snapshot its values
    const overlay = second.doc.querySelector(".sam-panel-overlay") as HTMLInputElement;
    overlay.checked = true;
    overlay.dispatchEvent(new second.dom.window.Event("change"));
    const overlayBefore = second.demo.overlayValues();
    expect(overlayBefore).toContain("1.000");

    // switch style via the panel: reorder applies immediately, no reload
    const styleSelect = second.doc.querySelector(".sam-panel-style") as HTMLSelectElement;
    styleSelect.value = "1"; // reorder-items
    styleSelect.dispatchEvent(new second.dom.window.Event("change"));
    expect(menuLabels(second.doc)[0]).toBe("Featured contents");
    expect(highlightedLabels(second.doc)).toEqual([]); // highlight style gone
    // decoupling: same policy, so the overlay values are untouched
    expect(second.demo.overlayValues()).toEqual(overlayBefore);

    // clear history from the panel: original menu restored exactly
    overlay.checked = false;
    overlay.dispatchEvent(new second.dom.window.Event("change"));
    (second.doc.querySelector(".sam-panel-clear") as HTMLButtonElement).click();
    expect(menuLabels(second.doc)).toEqual(ORIGINAL_MENU);
    expect(second.doc.querySelector("nav.menu")!.outerHTML).toBe(pristineNav);
    expect(storage.getItem(STORE_KEY)).toBe('{"version":1,"revision":0,"events":[]}');
    expect(second.demo.eventCount()).toBe(0);
  });

  it("export feeds cmd_adapt, which reproduces the highlighted set exactly", () => {
    const clock = new FakeClock();
    const storage = new MemoryStorage();

    // build up history: clicks with different weights plus real page dwell
    const first = bootPage("index.html", storage, clock);
    for (let k = 0; k < 3; k++) {
      clock.advance(500);
      itemByLabel(first.doc, "Featured contents").click();
    }
    clock.advance(500);
    itemByLabel(first.doc, "Donate to Wikipedia").click();
    leavePage(first.dom, clock, 45_000);

    clock.advance(1_000);
    const second = bootPage("featured.html", storage, clock);
    leavePage(second.dom, clock, 20_000);

    clock.advance(1_000);
    const third = bootPage("index.html", storage, clock);
    const demoHighlighted = highlightedLabels(third.doc);
    expect(demoHighlighted).toEqual(["Featured contents", "Donate to Wikipedia"]);

    const exported = third.demo.exportLog();
    expect(JSON.parse(exported).events.length).toBe(third.demo.eventCount());

    const dir = mkdtempSync(join(tmpdir(), "menuadapt-demo-"));
    const logPath = join(dir, "export.json");
    writeFileSync(logPath, exported);
    const selectorsPath = join(dir, "selectors.json");
    writeFileSync(
      selectorsPath,
      JSON.stringify({ menus: [{ menu: ".menu", group: null, item: ".item" }] }),
    );
    const outPath = join(dir, "adapted.html");
    runCli([
      "adapt",
      "--html", sitePagePath("index.html"),
      "--selectors", selectorsPath,
      "--log", logPath,
      "--policy", "click-frequency",
      "--style", "highlight",
      "--top-n", "auto",
      "--now", String(clock.t),
      "--out", outPath,
      "--report", join(dir, "report.json"),
    ]);
    expect(highlightedInFile(outPath)).toEqual(demoHighlighted);

    // switching policy in the panel stays consistent with the CLI too
    third.demo.setPolicy("visit-duration");
    const byDuration = highlightedLabels(third.doc);
    expect(byDuration).toEqual(["Main page", "Featured contents"]);
    const outDuration = join(dir, "adapted-duration.html");
    runCli([
      "adapt",
      "--html", sitePagePath("index.html"),
      "--selectors", selectorsPath,
      "--log", logPath,
      "--policy", "visit-duration",
      "--style", "highlight",
      "--top-n", "auto",
      "--now", String(clock.t),
      "--out", outDuration,
      "--report", join(dir, "report-duration.json"),
    ]);
    expect(highlightedInFile(outDuration)).toEqual(byDuration);
  });

  it("import then export round-trips the store byte-for-byte", () => {
    const clock = new FakeClock();
    const storage = new MemoryStorage();
    const envelope =
      '{"version":1,"revision":2,"events":[' +
      '{"type":"click","item":"nav#site-nav:0>ul:0>li:2","page":"/index.html","t":1700000000500},' +
      '{"type":"visit","page":"/index.html","enter":1700000000000,"leave":1700000030000}]}';

    const first = bootPage("index.html", storage, clock);
    first.demo.importLog(envelope);

    const second = bootPage("index.html", storage, clock);
    expect(second.demo.exportLog()).toBe(envelope);
    expect(highlightedLabels(second.doc)).toEqual(["Featured contents"]);
  });

  it("initializes inert when no selector matches, and still logs", () => {
    const clock = new FakeClock();
    const storage = new MemoryStorage();
    const dom = pageDom("index.html");
    const demo = Demo.boot({
      bridge,
      document: dom.window.document,
      storage,
      page: "/index.html",
      now: clock.now,
      selectors: { menus: [{ menu: ".does-not-exist", group: null, item: ".item" }] },
    });
    expect(demo.warnings.join(" ")).toContain("inert");
    expect(demo.scores()).toEqual([]);
    leavePage(dom, clock, 5_000);
    expect(storage.getItem(STORE_KEY)).toContain('"type":"visit"');
  });
});
