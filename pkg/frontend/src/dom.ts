import type { ReviewView } from "./controller.js";
import type { Category, QueueItem, StatsPayload } from "./types.js";
import { statsFields } from "./statsPanel.js";

function byId<T extends HTMLElement>(root: Document, id: string): T {
  const element = root.getElementById(id);
  if (!element) throw new Error(`missing element #${id}`);
  return element as T;
}

/** Concrete page bindings for the review flow and the stats panel. */
export class DomView implements ReviewView {
  private readonly image: HTMLImageElement;
  private readonly scoreLine: HTMLElement;
  private readonly progress: HTMLElement;
  private readonly banner: HTMLElement;
  private readonly completion: HTMLElement;
  private readonly reviewPane: HTMLElement;
  private readonly statsBody: HTMLElement;
  private readonly staleMark: HTMLElement;
  private readonly categoryButtons: HTMLButtonElement[];

  constructor(private readonly root: Document) {
    this.image = byId<HTMLImageElement>(root, "candidate-image");
    this.scoreLine = byId(root, "score-line");
    this.progress = byId(root, "progress");
    this.banner = byId(root, "retry-banner");
    this.completion = byId(root, "completion");
    this.reviewPane = byId(root, "review-pane");
    this.statsBody = byId(root, "stats-body");
    this.staleMark = byId(root, "stats-stale");
    this.categoryButtons = Array.from(
      root.querySelectorAll<HTMLButtonElement>("button[data-category]"),
    );
  }

  showItem(item: QueueItem, preselected: Category | null): void {
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

  showCompletion(): void {
    this.reviewPane.hidden = true;
    this.completion.hidden = false;
  }

  showError(message: string): void {
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  clearError(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
  }

  updateProgress(submitted: number, queueDepth: number): void {
    this.progress.textContent = `${submitted} labeled · ${queueDepth} in queue`;
  }

  toggleZoom(): void {
    this.image.classList.toggle("zoomed");
  }

  toggleHelp(): void {
    const help = this.root.getElementById("help-panel") as HTMLDetailsElement | null;
    if (help) help.open = !help.open;
  }

  renderStats(payload: StatsPayload | null, stale: boolean): void {
    this.staleMark.hidden = !stale;
    if (payload === null) return;
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
