// Demo wiring: one Demo instance per page load. The engine (behind the
// bridge) decides everything; this class executes plans on the live DOM,
// persists store text, and exposes the runtime personalization hooks the
// panel calls.

import type { EngineBridge } from "./bridge.js";
import { PlanExecutor, resolveElementId } from "./executor.js";
import { Panel } from "./panel.js";
import { downloadStore, StoreAccess, StorageLike } from "./store.js";
import type {
  EngineState,
  PolicyMessage,
  SelectorConfig,
  StyleMessage,
} from "./types.js";

export const DEFAULT_SELECTORS: SelectorConfig = {
  menus: [{ menu: ".menu", group: null, item: ".item" }],
};

export interface DemoOptions {
  bridge: EngineBridge;
  document: Document;
  storage: StorageLike;
  page: string;
  selectors?: SelectorConfig;
  policy?: PolicyMessage;
  style?: StyleMessage;
  now?: () => number;
  panelHost?: Element | null;
}

function serializeDocument(doc: Document): string {
  return "<!DOCTYPE html>" + doc.documentElement.outerHTML;
}

export class Demo {
  readonly warnings: string[];
  private state: EngineState;
  private executor: PlanExecutor;
  private store: StoreAccess;
  private now: () => number;
  private overlayOn = false;
  private panel: Panel | null = null;

  private constructor(private options: DemoOptions, state: EngineState) {
    this.state = state;
    this.warnings = state.warnings;
    this.executor = new PlanExecutor(options.document);
    this.store = new StoreAccess(options.storage);
    this.now = options.now ?? (() => Date.now());
  }

  /** Initialize on a fully loaded document: adapt, then start logging. */
  static boot(options: DemoOptions): Demo {
    const store = new StoreAccess(options.storage);
    const state = options.bridge.boot({
      html: serializeDocument(options.document),
      selectors: options.selectors ?? DEFAULT_SELECTORS,
      store_text: store.load(),
      policy: options.policy,
      style: options.style,
      page: options.page,
      now: (options.now ?? (() => Date.now()))(),
    });
    const demo = new Demo(options, state);
    demo.executor.execute(state.plan);
    demo.wireItems();
    demo.wirePageExit();
    if (options.panelHost) {
      demo.panel = new Panel(options.panelHost, demo.controller());
    }
    return demo;
  }

  private wireItems(): void {
    for (const entry of this.state.scores) {
      const el = resolveElementId(this.options.document, entry.id);
      el?.addEventListener("click", () => {
        const update = this.options.bridge.notifyClick(entry.id, this.now());
        this.store.save(update.store_text);
        this.panel?.refresh();
      });
    }
  }

  private wirePageExit(): void {
    const win = this.options.document.defaultView;
    win?.addEventListener("pagehide", () => {
      const update = this.options.bridge.notifyPageExit(this.now());
      this.store.save(update.store_text);
    });
  }

  private readapt(state: EngineState): void {
    this.state = state;
    this.executor.revert();
    this.executor.execute(state.plan);
    this.refreshOverlay();
  }

  scores(): ReadonlyArray<{ id: string; label: string; score: number }> {
    return this.state.scores;
  }

  highlightedLabels(): string[] {
    return this.state.scores
      .filter((s) => {
        const el = resolveElementId(this.options.document, s.id);
        return el !== null && el.classList.contains("sam-highlighted");
      })
      .map((s) => s.label);
  }

  setPolicy(name: string): void {
    this.readapt(this.options.bridge.setPolicy({ policy_name: name }, this.now()));
  }

  setStyle(names: string[], topN: number | "auto" = "auto"): void {
    this.readapt(
      this.options.bridge.setStyle(
        { style_name: names.length === 1 ? names[0] : names, top_n: topN },
        this.now(),
      ),
    );
  }

  clearHistory(): void {
    const state = this.options.bridge.clearHistory(this.now());
    if (state.store_text !== undefined) {
      this.store.save(state.store_text);
    }
    this.readapt(state);
  }

  exportLog(): string {
    return this.options.bridge.exportStore().store_text;
  }

  importLog(text: string): void {
    this.store.importText(text);
  }

  eventCount(): number {
    return this.store.eventCount();
  }

  toggleOverlay(on: boolean): void {
    this.overlayOn = on;
    this.refreshOverlay();
  }

  overlayValues(): string[] {
    return this.state.scores
      .map((s) => resolveElementId(this.options.document, s.id))
      .filter((el): el is Element => el !== null && el.hasAttribute("data-sam-score"))
      .map((el) => el.getAttribute("data-sam-score")!);
  }

  private refreshOverlay(): void {
    for (const entry of this.state.scores) {
      const el = resolveElementId(this.options.document, entry.id);
      if (!el) continue;
      if (this.overlayOn) {
        el.setAttribute("data-sam-score", entry.score.toFixed(3));
      } else {
        el.removeAttribute("data-sam-score");
      }
    }
  }

  private controller() {
    return {
      currentPolicy: () => this.state.policy,
      currentStyle: () => this.state.style,
      setPolicy: (name: string) => this.setPolicy(name),
      setStyle: (names: string[], topN: number | "auto") => this.setStyle(names, topN),
      clearHistory: () => this.clearHistory(),
      exportLog: () => downloadStore(this.options.document, this.exportLog()),
      toggleOverlay: (on: boolean) => this.toggleOverlay(on),
      eventCount: () => this.eventCount(),
    };
  }
}

/** Entry point for the sample site: load the engine bundle and boot. */
export async function bootBrowserDemo(): Promise<Demo> {
  const { createBridge } = await import("./bridge.js");
  const response = await fetch("./engine/bundle.json");
  const bundle = (await response.json()) as Record<string, string>;
  const bridge = await createBridge({
    bundle,
    indexURL: "../node_modules/pyodide/",
  });
  const doc = window.document;
  return Demo.boot({
    bridge,
    document: doc,
    storage: window.localStorage,
    page: window.location.pathname,
    panelHost: doc.getElementById("sam-panel"),
  });
}
