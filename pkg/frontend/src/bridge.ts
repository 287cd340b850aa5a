// Engine binding: the Python engine runs as an opaque WebAssembly unit
// behind a single message entry point. Nothing on the JS side scores or
// plans; it only passes messages and executes returned plans.

import { loadPyodide } from "pyodide";
import type {
  EngineState,
  Mutation,
  PolicyMessage,
  ScoreEntry,
  SelectorConfig,
  StoreUpdate,
  StyleMessage,
} from "./types.js";

export interface BootPayload {
  html: string;
  selectors: SelectorConfig;
  store_text: string | null;
  policy?: PolicyMessage;
  style?: StyleMessage;
  page: string;
  now: number;
}

export interface EngineBridge {
  boot(payload: BootPayload): EngineState;
  notifyClick(item: string, now: number): StoreUpdate;
  notifyPageExit(now: number): StoreUpdate;
  setPolicy(policy: PolicyMessage, now: number): EngineState;
  setStyle(style: StyleMessage, now: number): EngineState;
  getScores(): ScoreEntry[];
  getPlan(): Mutation[];
  clearHistory(now: number): EngineState;
  exportStore(): { store_text: string; events: number };
}

export interface BridgeOptions {
  /** filename -> source map produced by scripts/bundle-engine.mjs */
  bundle: Record<string, string>;
  /** where pyodide's own assets live (defaults to node resolution) */
  indexURL?: string;
}

class MessageError extends Error {}

export async function createBridge(options: BridgeOptions): Promise<EngineBridge> {
  const pyodide = await loadPyodide(
    options.indexURL ? { indexURL: options.indexURL } : {},
  );
  pyodide.FS.mkdirTree("/engine/menuadapt");
  for (const [name, source] of Object.entries(options.bundle)) {
    pyodide.FS.writeFile(`/engine/${name}`, source);
  }
  pyodide.runPython("import sys; sys.path.insert(0, '/engine')");
  const handler = pyodide.runPython(
    "from enginebridge import handle_message; handle_message",
  );

  function call<T>(name: string, payload: unknown): T {
    const raw = handler(name, JSON.stringify(payload ?? {})) as string;
    const result = JSON.parse(raw);
    if (!result.ok) {
      throw new MessageError(result.error ?? `engine message ${name} failed`);
    }
    return result as T;
  }

  return {
    boot: (payload) => call<EngineState>("boot", payload),
    notifyClick: (item, now) => call<StoreUpdate>("notify-click", { item, now }),
    notifyPageExit: (now) => call<StoreUpdate>("notify-page-exit", { now }),
    setPolicy: (policy, now) => call<EngineState>("set-policy", { policy, now }),
    setStyle: (style, now) => call<EngineState>("set-style", { style, now }),
    getScores: () => call<{ scores: ScoreEntry[] }>("get-scores", {}).scores,
    getPlan: () => call<{ plan: Mutation[] }>("get-plan", {}).plan,
    clearHistory: (now) => call<EngineState>("clear-history", { now }),
    exportStore: () =>
      call<{ store_text: string; events: number }>("export-store", {}),
  };
}
