// Executes adaptation plans on the live DOM and reverts them exactly.
// Element ids mirror the engine's structural form: steps `tag#id:index`
// joined by `>`, anchored at a unique-id element or the document root.

import type { Mutation } from "./types.js";

const FOLD_TOKEN = "sam-folded";

interface Step {
  tag: string;
  id: string | null;
  index: number;
}

const STEP_RE = /^([^#:>]+)(?:#([^:>]*))?:(\d+)$/;

export function parseElementId(key: string): Step[] {
  return key.split(">").map((raw) => {
    const m = STEP_RE.exec(raw);
    if (!m) throw new Error(`malformed element id step: ${raw}`);
    return {
      tag: m[1],
      id: m[2] !== undefined ? decodeURIComponent(m[2]) : null,
      index: parseInt(m[3], 10),
    };
  });
}

export function resolveElementId(doc: Document, key: string): Element | null {
  const steps = parseElementId(key);
  const first = steps[0];
  let el: Element | null;
  if (first.id !== null) {
    el = doc.getElementById(first.id);
  } else {
    // paths without an id anchor start at the document root
    el = doc.documentElement;
  }
  if (!el || el.tagName.toLowerCase() !== first.tag) return null;
  for (const step of steps.slice(1)) {
    el = el.children[step.index] ?? null;
    if (!el || el.tagName.toLowerCase() !== step.tag) return null;
  }
  return el;
}

type Undo =
  | { kind: "class"; el: Element; original: string | null }
  | { kind: "move"; el: Element; parent: Node; next: Node | null };

function addToken(el: Element, token: string): Undo {
  const original = el.getAttribute("class");
  el.classList.add(token);
  return { kind: "class", el, original };
}

/** Applies engine plans mutation by mutation, recording exact undo state. */
export class PlanExecutor {
  private undoStack: Undo[] = [];

  constructor(private doc: Document) {}

  get active(): boolean {
    return this.undoStack.length > 0;
  }

  execute(plan: Mutation[]): void {
    if (this.active) {
      throw new Error("an adaptation is already applied; revert it first");
    }
    for (const mutation of plan) {
      const el = resolveElementId(this.doc, mutation.target);
      if (!el) {
        this.revert();
        throw new Error(`stale plan target: ${mutation.target}`);
      }
      if (mutation.op === "add-marker") {
        this.undoStack.push(addToken(el, mutation.token));
      } else if (mutation.op === "collapse") {
        this.undoStack.push(addToken(el, FOLD_TOKEN));
      } else {
        const parent = el.parentNode;
        if (!parent) {
          this.revert();
          throw new Error(`plan target has no parent: ${mutation.target}`);
        }
        this.undoStack.push({ kind: "move", el, parent, next: el.nextSibling });
        if (mutation.anchor === null) {
          parent.insertBefore(el, parent.firstChild);
        } else {
          const anchor = resolveElementId(this.doc, mutation.anchor);
          if (!anchor || !anchor.parentNode) {
            this.revert();
            throw new Error(`stale plan anchor: ${mutation.anchor}`);
          }
          anchor.parentNode.insertBefore(el, anchor);
        }
      }
    }
  }

  revert(): void {
    while (this.undoStack.length) {
      const undo = this.undoStack.pop()!;
      if (undo.kind === "class") {
        if (undo.original === null) {
          undo.el.removeAttribute("class");
        } else {
          undo.el.setAttribute("class", undo.original);
        }
      } else {
        undo.parent.insertBefore(undo.el, undo.next);
      }
    }
  }
}
