// Shared wire types for the engine binding boundary.

export interface SelectorEntry {
  menu: string;
  group: string | null;
  item: string;
}

export interface SelectorConfig {
  menus: SelectorEntry[];
}

export interface ScoreEntry {
  id: string;
  label: string;
  page_target: string | null;
  menu: number;
  score: number;
}

export type Mutation =
  | { op: "add-marker"; target: string; token: string }
  | { op: "move-before"; target: string; anchor: string | null }
  | { op: "collapse"; target: string };

export interface PolicyMessage {
  policy_name: string;
  serial_position_weights?: [number, number, number];
  access_rank_params?: Record<string, unknown>;
}

export interface StyleMessage {
  style_name: string | string[];
  top_n?: number | "auto";
  min_visible_on_fold?: number;
}

export interface EngineState {
  ok: boolean;
  error?: string;
  scores: ScoreEntry[];
  plan: Mutation[];
  warnings: string[];
  policy: string;
  style: string[];
  events: number;
  store_text?: string;
}

export interface StoreUpdate {
  ok: boolean;
  error?: string;
  store_text: string;
  events: number;
}

export const POLICY_NAMES = [
  "click-frequency",
  "visit-duration",
  "visit-frequency",
  "visit-recency",
  "serial-position",
  "access-rank",
] as const;

export const STYLE_NAMES = [
  "highlight",
  "reorder-items",
  "reorder-groups",
  "fold",
] as const;

// The four base styles plus every ordered pairwise composite the panel offers.
export const STYLE_CHOICES: ReadonlyArray<readonly string[]> = [
  ["highlight"],
  ["reorder-items"],
  ["reorder-groups"],
  ["fold"],
  ["highlight", "reorder-items"],
  ["highlight", "reorder-groups"],
  ["highlight", "fold"],
  ["reorder-items", "reorder-groups"],
  ["reorder-items", "fold"],
  ["reorder-groups", "fold"],
];
