import { statsFields } from "./statsPanel.js";
function byId(root, id) {
    const element = root.getElementById(id);
    if (!element)
        throw new Error(`missing element #${id}`);
    return element;
}
/** Concrete page bindings for the review flow and the stats panel. */
export class DomView {
    root;
    image;
    scoreLine;
    progress;
    banner;
    completion;
    reviewPane;
    statsBody;
    staleMark;
    categoryButtons;
    constructor(root) {
        this.root = root;
        this.image = byId(root, "candidate-image");
        this.scoreLine = byId(root, "score-line");
        this.progress = byId(root, "progress");
        this.banner = byId(root, "retry-banner");
        this.completion = byId(root, "completion");
        this.reviewPane = byId(root, "review-pane");
        this.statsBody = byId(root, "stats-body");
        this.staleMark = byId(root, "stats-stale");
        this.categoryButtons = Array.from(root.querySelectorAll("button[data-category]"));
    }
    showItem(item, preselected) {
        this.completion.hidden = true;
        this.reviewPane.hidden = false;
        this.image.src = item.image_url;
        this.image.alt = `candidate ${item.image_id}`;
        this.scoreLine.textContent = `${item.image_id} — eye-distance score ${item.g}`;
        for (const button of this.categoryButtons) {
            const matches = preselected !== null && button.dataset["category"] === String(preselected);
            button.classList.toggle("preselected", matches);
        }
    }
    showCompletion() {
        this.reviewPane.hidden = true;
        this.completion.hidden = false;
    }
    showError(message) {
        this.banner.textContent = message;
        this.banner.hidden = false;
    }
    clearError() {
        this.banner.hidden = true;
        this.banner.textContent = "";
    }
    updateProgress(submitted, queueDepth) {
        this.progress.textContent = `${submitted} labeled · ${queueDepth} in queue`;
    }
    toggleZoom() {
        this.image.classList.toggle("zoomed");
    }
    toggleHelp() {
        const help = this.root.getElementById("help-panel");
        if (help)
            help.open = !help.open;
    }
    renderStats(payload, stale) {
        this.staleMark.hidden = !stale;
        if (payload === null)
            return;
        this.statsBody.replaceChildren();
        for (const [label, value] of statsFields(payload)) {
            const row = this.root.createElement("tr");
            const name = this.root.createElement("td");
            name.textContent = label;
            const cell = this.root.createElement("td");
            cell.textContent = value;
            cell.dataset["field"] = label;
            row.append(name, cell);
            this.statsBody.append(row);
        }
    }
}
