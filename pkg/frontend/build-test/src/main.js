import { ApiClient } from "./api.js";
import { ReviewController } from "./controller.js";
import { DomView } from "./dom.js";
import { bindKeyboard } from "./keyboard.js";
import { StatsPoller } from "./statsPanel.js";
/** Wire the page; exported so a scripted session can boot any Document. */
export function boot(root, fetchImpl) {
    const api = new ApiClient(fetchImpl);
    const view = new DomView(root);
    const form = root.getElementById("annotator-form");
    const input = root.getElementById("annotator-input");
    const gate = root.getElementById("annotator-gate");
    const workspace = root.getElementById("workspace");
    let controller = null;
    let poller = null;
    const handlers = {
        onCategory(category) {
            void controller?.submit(category);
        },
        onUndo() {
            controller?.undo();
        },
        onSkip() {
            void controller?.skip();
        },
        onZoom() {
            view.toggleZoom();
        },
        onHelp() {
            view.toggleHelp();
        },
    };
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        const annotator = input.value.trim();
        if (!annotator)
            return;
        gate.hidden = true;
        workspace.hidden = false;
        controller = new ReviewController(api, view, annotator);
        poller = new StatsPoller(api, (payload, stale) => view.renderStats(payload, stale));
        poller.start();
        bindKeyboard(root, handlers);
        for (const button of Array.from(root.querySelectorAll("button[data-category]"))) {
            button.addEventListener("click", () => {
                void controller?.submit(Number(button.dataset["category"]));
            });
        }
        root.getElementById("undo-button").addEventListener("click", () => controller?.undo());
        root.getElementById("skip-button").addEventListener("click", () => {
            void controller?.skip();
        });
        root.getElementById("zoom-button").addEventListener("click", () => view.toggleZoom());
        void controller.start();
        input.blur();
    });
    return {
        controller: () => controller,
        poller: () => poller,
    };
}
if (typeof window !== "undefined" && typeof document !== "undefined") {
    window.ganeyeBoot = boot;
    boot(document, window.fetch.bind(window));
}
