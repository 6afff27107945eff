import type { Category } from "./types.js";

export interface KeyHandlers {
  onCategory(category: Category): void;
  onUndo(): void;
  onSkip(): void;
  onZoom(): void;
  onHelp(): void;
}

/** Pure key-to-action mapping; returns whether the key was handled. */
export function handleKey(key: string, handlers: KeyHandlers): boolean {
  switch (key) {
    case "1":
    case "2":
    case "3":
      handlers.onCategory(Number(key) as Category);
      return true;
    case "u":
    case "U":
      handlers.onUndo();
      return true;
    case "s":
    case "S":
      handlers.onSkip();
      return true;
    case "z":
    case "Z":
      handlers.onZoom();
      return true;
    case "h":
    case "H":
    case "?":
      handlers.onHelp();
      return true;
    default:
      return false;
  }
}

const EDITABLE_TAGS = new Set(["INPUT", "TEXTAREA", "SELECT"]);

interface KeyEventLike {
  key: string;
  target: unknown;
  preventDefault(): void;
}

interface KeyEventSource {
  addEventListener(type: "keydown", listener: (event: KeyboardEvent) => void): void;
  removeEventListener(type: "keydown", listener: (event: KeyboardEvent) => void): void;
}

export function shouldIgnore(target: unknown): boolean {
  const element = target as { tagName?: string; isContentEditable?: boolean } | null;
  if (!element || typeof element.tagName !== "string") return false;
  return EDITABLE_TAGS.has(element.tagName) || element.isContentEditable === true;
}

/** Attach the mapping to a document; returns the unbind function. */
export function bindKeyboard(source: KeyEventSource, handlers: KeyHandlers): () => void {
  const listener = (event: KeyboardEvent) => {
    const like = event as unknown as KeyEventLike;
    if (shouldIgnore(like.target)) return;
    if (handleKey(like.key, handlers)) {
      like.preventDefault();
    }
  };
  source.addEventListener("keydown", listener);
  return () => source.removeEventListener("keydown", listener);
}
