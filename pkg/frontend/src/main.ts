import { ApiClient } from "./api.js";
import { ReviewController } from "./controller.js";
import { DomView } from "./dom.js";
import { bindKeyboard } from "./keyboard.js";
import { StatsPoller } from "./statsPanel.js";
import type { Category } from "./types.js";

export interface SessionHandle {
  /** The live controller; null until an annotator id has been entered. */
  controller(): ReviewController | null;
  poller(): StatsPoller | null;
}

/** Wire the page; exported so a scripted session can boot any Document. */
export function boot(root: Document, fetchImpl: typeof fetch): SessionHandle {
  const api = new ApiClient(fetchImpl);
  const view = new DomView(root);

  const form = root.getElementById("annotator-form") as HTMLFormElement;
  const input = root.getElementById("annotator-input") as HTMLInputElement;
  const gate = root.getElementById("annotator-gate") as HTMLElement;
  const workspace = root.getElementById("workspace") as HTMLElement;

  let controller: ReviewController | null = null;
  let poller: StatsPoller | null = null;

  const handlers = {
    onCategory(category: Category): void {
      void controller?.submit(category);
    },
    onUndo(): void {
      controller?.undo();
    },
    onSkip(): void {
      void controller?.skip();
    },
    onZoom(): void {
      view.toggleZoom();
    },
    onHelp(): void {
      view.toggleHelp();
    },
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const annotator = input.value.trim();
    if (!annotator) return;
    gate.hidden = true;
    workspace.hidden = false;
    controller = new ReviewController(api, view, annotator);
    poller = new StatsPoller(api, (payload, stale) => view.renderStats(payload, stale));
    poller.start();
    bindKeyboard(root, handlers);
    for (const button of Array.from(
      root.querySelectorAll<HTMLButtonElement>("button[data-category]"),
    )) {
      button.addEventListener("click", () => {
        void controller?.submit(Number(button.dataset["category"]) as Category);
      });
    }
    (root.getElementById("undo-button") as HTMLButtonElement).addEventListener("click", () =>
      controller?.undo(),
    );
    (root.getElementById("skip-button") as HTMLButtonElement).addEventListener("click", () => {
      void controller?.skip();
    });
    (root.getElementById("zoom-button") as HTMLButtonElement).addEventListener("click", () =>
      view.toggleZoom(),
    );
    void controller.start();
    input.blur();
  });

  return {
    controller: () => controller,
    poller: () => poller,
  };
}

declare global {
  interface Window {
    ganeyeBoot?: typeof boot;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  window.ganeyeBoot = boot;
  boot(document, window.fetch.bind(window));
}
