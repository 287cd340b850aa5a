import { readFileSync } from "node:fs";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { JSDOM, VirtualConsole } from "jsdom";

import { createBridge, type EngineBridge } from "../src/bridge.js";

const here = dirname(fileURLToPath(import.meta.url));
export const SITE_DIR = resolve(here, "..", "site");
export const REPO_ROOT = resolve(here, "..", "..");

export function sitePagePath(name: string): string {
  return join(SITE_DIR, name);
}

/** Load a sample-site page as its own window/document, sharing nothing.
    Pages are mounted at the origin root so relative links resolve to the
    same page ids the CLI derives without a base. */
export function pageDom(name: string): JSDOM {
  const html = readFileSync(sitePagePath(name), "utf-8");
  return new JSDOM(html, {
    url: `http://localhost:8000/${name}`,
    virtualConsole: new VirtualConsole(), // silence jsdom navigation noise
  });
}

let bridgePromise: Promise<EngineBridge> | null = null;

/** One engine instance per test file; boots reset its page state. */
export function engineBridge(): Promise<EngineBridge> {
  if (!bridgePromise) {
    const bundle = JSON.parse(
      readFileSync(join(SITE_DIR, "engine", "bundle.json"), "utf-8"),
    ) as Record<string, string>;
    bridgePromise = createBridge({ bundle });
  }
  return bridgePromise;
}

export class FakeClock {
  constructor(public t = 1_700_000_000_000) {}
  now = (): number => this.t;
  advance(ms: number): number {
    this.t += ms;
    return this.t;
  }
}

export function menuLabels(doc: Document): string[] {
  return Array.from(doc.querySelectorAll(".menu .item")).map(
    (el) => el.textContent?.trim() ?? "",
  );
}

export function highlightedLabels(doc: Document): string[] {
  return Array.from(doc.querySelectorAll(".menu .item.sam-highlighted")).map(
    (el) => el.textContent?.trim() ?? "",
  );
}

export function itemByLabel(doc: Document, label: string): HTMLElement {
  const el = Array.from(doc.querySelectorAll(".menu .item")).find(
    (node) => node.textContent?.trim() === label,
  );
  if (!el) throw new Error(`no menu item labelled ${label}`);
  return el as HTMLElement;
}
