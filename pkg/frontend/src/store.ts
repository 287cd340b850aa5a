// Per-origin persistence of the interaction store. The value under the
// `sam-store` key is exactly the engine's serialized JSON envelope; this
// module never interprets it beyond counting events for display.

export const STORE_KEY = "sam-store";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

/** Map-backed stand-in used by tests and non-browser environments. */
export class MemoryStorage implements StorageLike {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.has(key) ? this.data.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}

export class StoreAccess {
  constructor(private storage: StorageLike) {}

  load(): string | null {
    return this.storage.getItem(STORE_KEY);
  }

  save(text: string): void {
    this.storage.setItem(STORE_KEY, text);
  }

  clear(): void {
    this.storage.removeItem(STORE_KEY);
  }

  importText(text: string): void {
    // validate it is at least a parsable envelope before trusting it
    const obj = JSON.parse(text);
    if (typeof obj !== "object" || obj === null || !Array.isArray(obj.events)) {
      throw new Error("not a store envelope");
    }
    this.save(text);
  }

  eventCount(): number {
    const text = this.load();
    if (text === null) return 0;
    try {
      const obj = JSON.parse(text);
      return Array.isArray(obj.events) ? obj.events.length : 0;
    } catch {
      return 0;
    }
  }
}

/** Trigger a file download of the store (browser only). */
export function downloadStore(doc: Document, text: string, filename = "sam-store.json"): void {
  const blob = new Blob([text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = doc.createElement("a");
  a.href = url;
  a.download = filename;
  doc.body.appendChild(a);
  a.click();
  a.remove();
  URL.revokeObjectURL(url);
}
